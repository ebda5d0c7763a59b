#pragma once

// Stage-I reward mechanisms: discriminatory and uniform rewards under
// complete information, the uniform-reward bound under incomplete
// information, and grid-search oracles used to validate them.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "crowdmarket/equilibrium.hpp"
#include "crowdmarket/influence.hpp"
#include "crowdmarket/kernels.hpp"
#include "crowdmarket/market.hpp"

namespace crowdmarket {

enum class Regime { kDiscriminatory, kUniform, kUniformBound };
std::string_view to_string(Regime regime);
/// Accepts "discriminatory"/"disc", "uniform", "uniform-bound"/"bound".
Regime parse_regime(std::string_view text);

/// What the provider knows under incomplete information.
struct ExpectationProfile {
  double e_a = 0.0;
  double e_b = 1.0;
  void validate() const;
};

struct RewardSolution {
  Regime regime = Regime::kDiscriminatory;
  RewardVector r;
  /// Realized equilibrium: the closed form when interior, otherwise
  /// best-response dynamics.
  EquilibriumResult equilibrium;
  /// csp_revenue at the realized equilibrium.
  double revenue = 0.0;
  Eigen::VectorXd mu_utilities;
  std::vector<std::string> warnings;

  // The same reward scored in the linear (closed-form) model, whether or not
  // that profile is interior. This is the quantity the closed-form optimum
  // actually maximizes.
  ParticipationProfile model_x;
  bool model_interior = false;
  double model_revenue = 0.0;
  Eigen::VectorXd model_mu_utilities;
};

struct RewardOptions {
  SolverConfig solver;
  /// Numerical revenue Hessian at the optimum for N up to this size.
  std::size_t hessian_max_n = 8;
  kernels::Execution execution = kernels::Execution::kAuto;
};

// Closed-form schedules, no equilibrium evaluation.

/// r* = (2I + 2 mu t K)^{-1} { mu [s 1 - 2 t K (a - c 1)] - (a - c 1) },
/// evaluated as (2(B - G) + 2 mu t I)^{-1} [(B - G)(mu s 1 - v) - 2 mu t v]
/// with v = a - c 1.
RewardVector discriminatory_schedule(const MarketInstance& inst);
RewardVector discriminatory_schedule(const MarketInstance& inst,
                                     const InfluenceOperator& influence);
/// Optimal scalar reward when every user is paid the same rate.
double uniform_rate(const MarketInstance& inst);
double uniform_rate(const MarketInstance& inst, const InfluenceOperator& influence);

/// Scores a given reward: realized and linear-model equilibria, revenue,
/// utilities, warnings (negative rewards, non-interior profiles).
RewardSolution evaluate_reward(const MarketInstance& inst,
                               const InfluenceOperator& influence, Regime regime,
                               RewardVector r, const RewardOptions& opts = {});

RewardSolution discriminatory_reward(const MarketInstance& inst,
                                     const RewardOptions& opts = {});
RewardSolution uniform_reward(const MarketInstance& inst, const RewardOptions& opts = {});
/// Uniform regime restricted to r >= 0: the closed form when it is already
/// nonnegative, otherwise a 1-D search of realized revenue.
RewardSolution uniform_reward_nonnegative(const MarketInstance& inst,
                                          const RewardOptions& opts = {});
/// Offers the incomplete-information bound as the uniform reward.
RewardSolution bound_reward(const MarketInstance& inst, const ExpectationProfile& exp,
                            const RewardOptions& opts = {});

/// Mean of the discriminatory schedule.
double average_discriminatory_reward(const MarketInstance& inst);

/// Lower bound on the optimal uniform reward when only E[a], E[b] are known:
///   (c - E[a])/2 + mu s/2
///     - (mu t / N)(mu s + E[a] - c) 1^T [2 E_b[B] - 2G + 2 mu t I]^{-1} 1
/// with E_b[B] = diag(2 E[b]). Throws SolverError when c < E[a] + mu s.
double incomplete_info_bound(const SocialGraph& graph, const MarketParams& params,
                             const ExpectationProfile& exp);

/// The per-draw quantity the bound is an expectation bound for: the same
/// expression with the realized b vector in place of E[b], i.e. the average
/// discriminatory reward of the market where every a_i equals a_bar.
double single_reward_for_draw(const SocialGraph& graph, const MarketParams& params,
                              double a_bar, const Eigen::VectorXd& b);

/// Provider revenue at the realized equilibrium for reward r.
double realized_revenue(const MarketInstance& inst, const InfluenceOperator& influence,
                        const RewardVector& r, const SolverConfig& solver = {});

// Oracles.

struct RewardRange {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr RewardRange kUniformOracleRange{-5.0, 25.0};
inline constexpr std::size_t kUniformOracleSteps = 30001;
inline constexpr RewardRange kDiscriminatoryOracleRange{0.0, 5.0};
inline constexpr std::size_t kDiscriminatoryOracleSteps = 501;
inline constexpr std::size_t kDiscriminatoryOracleMaxUsers = 3;

/// Grid point r_k = lo + k (hi - lo)/(steps - 1) maximizing realized revenue
/// of the uniform reward r_k 1. Lowest index wins ties.
double brute_force_uniform(const MarketInstance& inst,
                           RewardRange range = kUniformOracleRange,
                           std::size_t steps = kUniformOracleSteps,
                           const RewardOptions& opts = {});

/// Golden-section refinement of realized uniform revenue on [lo, hi].
double golden_section_uniform(const MarketInstance& inst, RewardRange range,
                              double tolerance, const RewardOptions& opts = {});

/// Exhaustive grid over range^N (N <= 3) maximizing realized revenue.
RewardVector brute_force_discriminatory(const MarketInstance& inst,
                                        RewardRange range = kDiscriminatoryOracleRange,
                                        std::size_t steps = kDiscriminatoryOracleSteps,
                                        const RewardOptions& opts = {});

/// Central-difference gradient of realized revenue in each r_i.
Eigen::VectorXd revenue_gradient(const MarketInstance& inst, const RewardVector& r,
                                 double h, const SolverConfig& solver = {});
/// Central-difference derivative of realized revenue along r -> r + h 1.
double uniform_revenue_derivative(const MarketInstance& inst, double r, double h,
                                  const SolverConfig& solver = {});
/// Central-difference Hessian of realized revenue in r.
Eigen::MatrixXd revenue_hessian(const MarketInstance& inst, const RewardVector& r, double h,
                                const SolverConfig& solver = {});

}  // namespace crowdmarket
