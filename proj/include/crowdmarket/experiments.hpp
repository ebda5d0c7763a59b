#pragma once

// Replicated sweeps over market size and tie strength, the chain case
// study, and their CSV renderings.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crowdmarket/reward.hpp"
#include "crowdmarket/scenario.hpp"

namespace crowdmarket {

/// Which participation profile a record scores.
///   kModel    - the closed-form (linear) profile x = K(a + r - c 1), kept
///               even when some entries are negative. This is the profile
///               the closed-form rewards optimize.
///   kRealized - the realized equilibrium: closed form when interior,
///               best-response dynamics otherwise.
enum class Evaluation { kModel, kRealized };
std::string_view to_string(Evaluation evaluation);
Evaluation parse_evaluation(std::string_view text);

struct ExperimentRecord {
  std::string experiment_id;
  std::uint64_t seed = 0;
  std::string sweep_name;
  double sweep_value = 0.0;
  Regime regime = Regime::kDiscriminatory;
  double revenue = 0.0;
  double total_mu_utility = 0.0;
  double total_reward_paid = 0.0;
  double mean_reward = 0.0;
  /// The closed-form profile is interior.
  bool interior = false;
  /// The realized equilibrium solve converged.
  bool converged = false;
  /// mu sum_i (s x_i - t x_i^2) of the scored profile; not written to CSV.
  double gross_contribution = 0.0;
  /// Non-empty when generation or solving failed; numeric fields are NaN.
  std::string error;
};

struct SweepOptions {
  std::size_t replicates = 30;
  Evaluation evaluation = Evaluation::kModel;
  RewardOptions reward;
};

/// Sweep values used when none are given.
std::vector<std::size_t> default_n_values();
std::vector<double> default_mu_g_values();

/// For each N and replicate seed base.seed + k: generate, solve all three
/// regimes, one record per regime. Sorted by (sweep value, seed, regime).
std::vector<ExperimentRecord> sweep_n(const ScenarioConfig& base,
                                      std::span<const std::size_t> n_values,
                                      const SweepOptions& opts = {});
/// Same, varying mu_g.
std::vector<ExperimentRecord> sweep_social(const ScenarioConfig& base,
                                           std::span<const double> mu_g_values,
                                           const SweepOptions& opts = {});

/// All three regimes for one generated instance.
std::vector<ExperimentRecord> run_replicate(const ScenarioConfig& cfg,
                                            std::string_view experiment_id,
                                            std::string_view sweep_name, double sweep_value,
                                            const SweepOptions& opts);

inline constexpr std::string_view kExperimentCsvHeader =
    "experiment_id,seed,sweep_name,sweep_value,regime,revenue,total_mu_utility,"
    "total_reward_paid,mean_reward,interior,converged";
void write_experiment_csv(std::ostream& out, std::span<const ExperimentRecord> records);

/// Per-(sweep value, regime) means over the successful replicates.
struct TrendPoint {
  double sweep_value = 0.0;
  Regime regime = Regime::kDiscriminatory;
  std::size_t replicates = 0;
  double mean_revenue = 0.0;
  double mean_total_mu_utility = 0.0;
  double mean_total_reward_paid = 0.0;
};
std::vector<TrendPoint> summarize(std::span<const ExperimentRecord> records);

struct CaseStudyConfig {
  std::size_t n = 51;
  double a = 15.0;
  double b = 0.1;
  MarketParams params{16.0, 0.01, 50.0, 0.05};
  Evaluation evaluation = Evaluation::kModel;
  RewardOptions reward;
};

struct CaseStudyRow {
  std::size_t index = 0;  // 1-based
  double uniform_r = 0.0;
  double uniform_x = 0.0;
  double disc_r = 0.0;
  double disc_x = 0.0;
  double uniform_x_norm = 0.0;
  double disc_r_norm = 0.0;
  double disc_x_norm = 0.0;
};

struct CaseStudyResult {
  std::vector<CaseStudyRow> rows;
  RewardSolution uniform;
  RewardSolution discriminatory;
  Assumption1Report assumption1;
};

/// Uniform and discriminatory regimes on the chain instance. Normalized
/// columns divide each series by its largest absolute entry.
CaseStudyResult case_study_chain(const CaseStudyConfig& cfg = {});

inline constexpr std::string_view kCaseStudyCsvHeader =
    "index,uniform_r,uniform_x,disc_r,disc_x,uniform_x_norm,disc_r_norm,disc_x_norm";
void write_case_study_csv(std::ostream& out, const CaseStudyResult& result);

/// Shortest decimal string that round-trips to the same double.
std::string format_shortest(double value);

}  // namespace crowdmarket
