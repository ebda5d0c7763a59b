#include "crowdmarket/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <tuple>

#include "crowdmarket/error.hpp"

namespace crowdmarket {
namespace {

constexpr Regime kRegimes[] = {Regime::kDiscriminatory, Regime::kUniform,
                               Regime::kUniformBound};

ExperimentRecord failed_record(std::string_view id, std::uint64_t seed,
                               std::string_view sweep_name, double value, Regime regime,
                               std::string message) {
  const double nan = std::nan("");
  ExperimentRecord rec;
  rec.experiment_id = std::string(id);
  rec.seed = seed;
  rec.sweep_name = std::string(sweep_name);
  rec.sweep_value = value;
  rec.regime = regime;
  rec.revenue = rec.total_mu_utility = rec.total_reward_paid = rec.mean_reward = nan;
  rec.gross_contribution = nan;
  rec.error = std::move(message);
  return rec;
}

ExperimentRecord to_record(const MarketInstance& inst, const RewardSolution& sol,
                           Evaluation evaluation) {
  const Eigen::VectorXd& x = evaluation == Evaluation::kModel ? sol.model_x.values()
                                                              : sol.equilibrium.x.values();
  ExperimentRecord rec;
  rec.regime = sol.regime;
  rec.revenue = csp_revenue(inst, x, sol.r);
  rec.total_mu_utility = total_mu_utility(inst, x, sol.r);
  rec.total_reward_paid = total_reward_paid(sol.r, x);
  rec.mean_reward = sol.r.mean();
  rec.interior = sol.model_interior;
  rec.converged = sol.equilibrium.converged;
  rec.gross_contribution = gross_contribution(inst, x);
  return rec;
}

struct Task {
  ScenarioConfig cfg;
  double value = 0.0;
};

std::vector<ExperimentRecord> run_tasks(const std::vector<Task>& tasks,
                                        std::string_view id, std::string_view sweep_name,
                                        const SweepOptions& opts) {
  std::vector<std::vector<ExperimentRecord>> slots(tasks.size());
  const auto count = static_cast<long long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long long k = 0; k < count; ++k) {
    const Task& task = tasks[static_cast<std::size_t>(k)];
    try {
      slots[static_cast<std::size_t>(k)] =
          run_replicate(task.cfg, id, sweep_name, task.value, opts);
    } catch (const std::exception& e) {
      auto& slot = slots[static_cast<std::size_t>(k)];
      slot.clear();
      for (Regime regime : kRegimes) {
        slot.push_back(failed_record(id, task.cfg.seed, sweep_name, task.value, regime,
                                     e.what()));
      }
    }
  }

  std::vector<ExperimentRecord> out;
  out.reserve(tasks.size() * 3);
  for (auto& slot : slots) {
    for (auto& rec : slot) out.push_back(std::move(rec));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return std::tuple(l.sweep_value, l.seed, static_cast<int>(l.regime)) <
           std::tuple(r.sweep_value, r.seed, static_cast<int>(r.regime));
  });
  return out;
}

double normalized(double value, double scale) { return scale > 0.0 ? value / scale : 0.0; }

}  // namespace

std::string_view to_string(Evaluation evaluation) {
  return evaluation == Evaluation::kModel ? "model" : "realized";
}

Evaluation parse_evaluation(std::string_view text) {
  if (text == "model") return Evaluation::kModel;
  if (text == "realized") return Evaluation::kRealized;
  throw ParseError("unknown evaluation '" + std::string(text) +
                   "' (expected model or realized)");
}

std::vector<std::size_t> default_n_values() { return {25, 50, 75, 100}; }
std::vector<double> default_mu_g_values() { return {0.05, 0.10, 0.15, 0.20}; }

std::vector<ExperimentRecord> run_replicate(const ScenarioConfig& cfg,
                                            std::string_view experiment_id,
                                            std::string_view sweep_name, double sweep_value,
                                            const SweepOptions& opts) {
  std::vector<ExperimentRecord> out;
  std::optional<GeneratedInstance> generated;
  try {
    generated = generate_random_instance(cfg);
  } catch (const std::exception& e) {
    for (Regime regime : kRegimes) {
      out.push_back(failed_record(experiment_id, cfg.seed, sweep_name, sweep_value, regime,
                                  std::string("generation failed: ") + e.what()));
    }
    return out;
  }
  const MarketInstance& inst = generated->instance;

  for (Regime regime : kRegimes) {
    try {
      RewardSolution sol;
      switch (regime) {
        case Regime::kDiscriminatory: sol = discriminatory_reward(inst, opts.reward); break;
        case Regime::kUniform: sol = uniform_reward(inst, opts.reward); break;
        case Regime::kUniformBound:
          sol = bound_reward(inst, expectation_of(cfg), opts.reward);
          break;
      }
      ExperimentRecord rec = to_record(inst, sol, opts.evaluation);
      rec.experiment_id = std::string(experiment_id);
      rec.seed = cfg.seed;
      rec.sweep_name = std::string(sweep_name);
      rec.sweep_value = sweep_value;
      out.push_back(std::move(rec));
    } catch (const std::exception& e) {
      out.push_back(
          failed_record(experiment_id, cfg.seed, sweep_name, sweep_value, regime, e.what()));
    }
  }
  return out;
}

std::vector<ExperimentRecord> sweep_n(const ScenarioConfig& base,
                                      std::span<const std::size_t> n_values,
                                      const SweepOptions& opts) {
  if (n_values.empty()) throw InvariantError("sweep_n needs at least one N value");
  if (opts.replicates < 1) throw InvariantError("sweep needs at least one replicate");
  std::vector<Task> tasks;
  for (std::size_t n : n_values) {
    for (std::size_t k = 0; k < opts.replicates; ++k) {
      Task task{base, static_cast<double>(n)};
      task.cfg.n = n;
      task.cfg.seed = base.seed + k;
      tasks.push_back(std::move(task));
    }
  }
  return run_tasks(tasks, "sweep-n", "n", opts);
}

std::vector<ExperimentRecord> sweep_social(const ScenarioConfig& base,
                                           std::span<const double> mu_g_values,
                                           const SweepOptions& opts) {
  if (mu_g_values.empty()) throw InvariantError("sweep_social needs at least one mu_g value");
  if (opts.replicates < 1) throw InvariantError("sweep needs at least one replicate");
  std::vector<Task> tasks;
  for (double mu_g : mu_g_values) {
    for (std::size_t k = 0; k < opts.replicates; ++k) {
      Task task{base, mu_g};
      task.cfg.mu_g = mu_g;
      task.cfg.seed = base.seed + k;
      tasks.push_back(std::move(task));
    }
  }
  return run_tasks(tasks, "sweep-social", "mu_g", opts);
}

std::string format_shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_experiment_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
  out << kExperimentCsvHeader << '\n';
  for (const ExperimentRecord& r : records) {
    out << r.experiment_id << ',' << r.seed << ',' << r.sweep_name << ','
        << format_shortest(r.sweep_value) << ',' << to_string(r.regime) << ','
        << format_shortest(r.revenue) << ',' << format_shortest(r.total_mu_utility) << ','
        << format_shortest(r.total_reward_paid) << ',' << format_shortest(r.mean_reward)
        << ',' << (r.interior ? "true" : "false") << ',' << (r.converged ? "true" : "false")
        << '\n';
  }
}

std::vector<TrendPoint> summarize(std::span<const ExperimentRecord> records) {
  std::map<std::pair<double, int>, TrendPoint> groups;
  for (const ExperimentRecord& r : records) {
    if (!r.error.empty()) continue;
    TrendPoint& p = groups[{r.sweep_value, static_cast<int>(r.regime)}];
    p.sweep_value = r.sweep_value;
    p.regime = r.regime;
    ++p.replicates;
    p.mean_revenue += r.revenue;
    p.mean_total_mu_utility += r.total_mu_utility;
    p.mean_total_reward_paid += r.total_reward_paid;
  }
  std::vector<TrendPoint> out;
  for (auto& [key, p] : groups) {
    const auto k = static_cast<double>(p.replicates);
    p.mean_revenue /= k;
    p.mean_total_mu_utility /= k;
    p.mean_total_reward_paid /= k;
    out.push_back(p);
  }
  return out;
}

CaseStudyResult case_study_chain(const CaseStudyConfig& cfg) {
  const MarketInstance inst = generate_chain_instance(cfg.n, cfg.params, cfg.a, cfg.b);
  CaseStudyResult result;
  result.assumption1 = check_assumption1(inst);
  result.uniform = uniform_reward(inst, cfg.reward);
  result.discriminatory = discriminatory_reward(inst, cfg.reward);

  const bool model = cfg.evaluation == Evaluation::kModel;
  const Eigen::VectorXd& ux =
      model ? result.uniform.model_x.values() : result.uniform.equilibrium.x.values();
  const Eigen::VectorXd& dx = model ? result.discriminatory.model_x.values()
                                    : result.discriminatory.equilibrium.x.values();
  const Eigen::VectorXd& dr = result.discriminatory.r.values();
  const double ux_scale = ux.cwiseAbs().maxCoeff();
  const double dx_scale = dx.cwiseAbs().maxCoeff();
  const double dr_scale = dr.cwiseAbs().maxCoeff();

  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    CaseStudyRow row;
    row.index = i + 1;
    row.uniform_r = result.uniform.r[i];
    row.uniform_x = ux(k);
    row.disc_r = dr(k);
    row.disc_x = dx(k);
    row.uniform_x_norm = normalized(ux(k), ux_scale);
    row.disc_r_norm = normalized(dr(k), dr_scale);
    row.disc_x_norm = normalized(dx(k), dx_scale);
    result.rows.push_back(row);
  }
  return result;
}

void write_case_study_csv(std::ostream& out, const CaseStudyResult& result) {
  out << kCaseStudyCsvHeader << '\n';
  for (const CaseStudyRow& r : result.rows) {
    out << r.index << ',' << format_shortest(r.uniform_r) << ','
        << format_shortest(r.uniform_x) << ',' << format_shortest(r.disc_r) << ','
        << format_shortest(r.disc_x) << ',' << format_shortest(r.uniform_x_norm) << ','
        << format_shortest(r.disc_r_norm) << ',' << format_shortest(r.disc_x_norm) << '\n';
  }
}

}  // namespace crowdmarket
