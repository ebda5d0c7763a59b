#include "crowdmarket/reward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crowdmarket/error.hpp"

namespace crowdmarket {
namespace {

Eigen::VectorXd ones(std::size_t n) {
  return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
}

Eigen::VectorXd net_intrinsic(const MarketInstance& inst) {
  return (inst.a().array() - inst.params().c).matrix();
}

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

// Largest eigenvalue of the symmetrized Hessian, scaled by its magnitude.
void check_second_order(const MarketInstance& inst, RewardSolution& sol,
                        const RewardOptions& opts) {
  if (inst.size() > opts.hessian_max_n) return;
  constexpr double kStep = 1e-3;
  double worst = 0.0;
  double scale = 1.0;
  if (sol.regime == Regime::kDiscriminatory) {
    const Eigen::MatrixXd h = revenue_hessian(inst, sol.r, kStep, opts.solver);
    const Eigen::MatrixXd sym = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    worst = eig.eigenvalues().maxCoeff();
    scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  } else {
    const double r = sol.r[0];
    const InfluenceOperator influence(inst);
    const auto at = [&](double v) {
      return realized_revenue(inst, influence, RewardVector::uniform(inst.size(), v),
                              opts.solver);
    };
    worst = (at(r + kStep) - 2.0 * at(r) + at(r - kStep)) / (kStep * kStep);
    scale = std::max(1.0, std::abs(worst));
  }
  if (worst > 1e-6 * scale) {
    sol.warnings.push_back("revenue Hessian is not negative semidefinite at r* (max eigenvalue " +
                           format_value(worst) + ")");
  }
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kDiscriminatory: return "discriminatory";
    case Regime::kUniform: return "uniform";
    case Regime::kUniformBound: return "uniform-bound";
  }
  return "unknown";
}

Regime parse_regime(std::string_view text) {
  if (text == "discriminatory" || text == "disc") return Regime::kDiscriminatory;
  if (text == "uniform") return Regime::kUniform;
  if (text == "uniform-bound" || text == "bound") return Regime::kUniformBound;
  throw ParseError("unknown regime '" + std::string(text) +
                   "' (expected disc, uniform or bound)");
}

void ExpectationProfile::validate() const {
  if (!std::isfinite(e_a)) throw InvariantError("expectation e_a must be finite");
  if (!std::isfinite(e_b) || e_b <= 0.0) {
    throw InvariantError("expectation e_b must be > 0");
  }
}

RewardVector discriminatory_schedule(const MarketInstance& inst) {
  return discriminatory_schedule(inst, InfluenceOperator(inst));
}

RewardVector discriminatory_schedule(const MarketInstance& inst,
                                     const InfluenceOperator& influence) {
  const MarketParams& p = inst.params();
  const std::size_t n = inst.size();
  const Eigen::VectorXd v = net_intrinsic(inst);
  const Eigen::MatrixXd& m = influence.matrix();

  // (2I + 2 mu t K) = K (2M + 2 mu t I), so multiplying the right-hand side
  // by M removes the only K application.
  const Eigen::VectorXd rhs = m * (p.mu * p.s * ones(n) - v) - 2.0 * p.mu * p.t * v;
  Eigen::MatrixXd lhs = 2.0 * m;
  lhs.diagonal().array() += 2.0 * p.mu * p.t;
  const DenseSolver solver(std::move(lhs), "2(B - G) + 2 mu t I");
  return RewardVector(solver.solve(rhs));
}

double uniform_rate(const MarketInstance& inst) {
  return uniform_rate(inst, InfluenceOperator(inst));
}

double uniform_rate(const MarketInstance& inst, const InfluenceOperator& influence) {
  const MarketParams& p = inst.params();
  const Eigen::VectorXd one = ones(inst.size());
  const Eigen::VectorXd v = net_intrinsic(inst);

  const Eigen::VectorXd k_one = influence.apply(one);
  const Eigen::VectorXd k2_one = influence.apply(k_one);
  const double one_k_one = one.dot(k_one);
  const double one_k2_one = one.dot(k2_one);
  const double v_k2_one = v.dot(k2_one);
  const double one_k_v = k_one.dot(v);  // K is symmetric

  const double denom = 2.0 * p.mu * p.t * one_k2_one + 2.0 * one_k_one;
  if (!(std::abs(denom) > 0.0) || !std::isfinite(denom)) {
    throw SolverError("uniform reward first-order condition is degenerate");
  }
  return (p.mu * (p.s * one_k_one - 2.0 * p.t * v_k2_one) - one_k_v) / denom;
}

double realized_revenue(const MarketInstance& inst, const InfluenceOperator& influence,
                        const RewardVector& r, const SolverConfig& solver) {
  const EquilibriumResult eq = solve_equilibrium(inst, influence, r, solver);
  return csp_revenue(inst, eq.x.values(), r);
}

RewardSolution evaluate_reward(const MarketInstance& inst,
                               const InfluenceOperator& influence, Regime regime,
                               RewardVector r, const RewardOptions& opts) {
  RewardSolution sol;
  sol.regime = regime;
  sol.r = std::move(r);

  EquilibriumResult closed = solve_closed_form(inst, influence, sol.r);
  sol.model_x = closed.x;
  sol.model_interior = closed.interior;
  sol.model_revenue = csp_revenue(inst, closed.x.values(), sol.r);
  sol.model_mu_utilities = mu_utilities(inst, closed.x.values(), sol.r);

  if (closed.interior) {
    sol.equilibrium = std::move(closed);
  } else {
    sol.warnings.emplace_back(
        "closed-form equilibrium is not interior; revenue is evaluated at the "
        "best-response equilibrium");
    sol.equilibrium = solve_br_dynamics(inst, sol.r, opts.solver);
  }
  for (const std::string& w : sol.equilibrium.warnings) {
    if (std::find(sol.warnings.begin(), sol.warnings.end(), w) == sol.warnings.end()) {
      sol.warnings.push_back(w);
    }
  }
  sol.revenue = csp_revenue(inst, sol.equilibrium.x.values(), sol.r);
  sol.mu_utilities = mu_utilities(inst, sol.equilibrium.x.values(), sol.r);

  const auto negative = (sol.r.values().array() < 0.0).count();
  if (negative > 0) {
    sol.warnings.push_back(std::to_string(negative) + " negative reward component(s), min r = " +
                           format_value(sol.r.values().minCoeff()));
  }
  return sol;
}

RewardSolution discriminatory_reward(const MarketInstance& inst, const RewardOptions& opts) {
  const InfluenceOperator influence(inst);
  RewardSolution sol = evaluate_reward(inst, influence, Regime::kDiscriminatory,
                                       discriminatory_schedule(inst, influence), opts);
  check_second_order(inst, sol, opts);
  return sol;
}

RewardSolution uniform_reward(const MarketInstance& inst, const RewardOptions& opts) {
  const InfluenceOperator influence(inst);
  const double r = uniform_rate(inst, influence);
  RewardSolution sol = evaluate_reward(inst, influence, Regime::kUniform,
                                       RewardVector::uniform(inst.size(), r), opts);
  check_second_order(inst, sol, opts);
  return sol;
}

RewardSolution uniform_reward_nonnegative(const MarketInstance& inst,
                                          const RewardOptions& opts) {
  const InfluenceOperator influence(inst);
  const double closed = uniform_rate(inst, influence);
  if (closed >= 0.0) return uniform_reward(inst, opts);

  // With x >= 0, any r > mu s earns at most the revenue at r = mu s, so the
  // search interval [0, mu s] covers [0, inf).
  const MarketParams& p = inst.params();
  const RewardRange range{0.0, p.mu * p.s};
  constexpr std::size_t kSteps = 2001;
  const double coarse = brute_force_uniform(inst, range, kSteps, opts);
  const double width = (range.hi - range.lo) / static_cast<double>(kSteps - 1);
  const double refined = golden_section_uniform(
      inst, {std::max(range.lo, coarse - width), std::min(range.hi, coarse + width)}, 1e-10,
      opts);
  const auto revenue_at = [&](double v) {
    return realized_revenue(inst, influence, RewardVector::uniform(inst.size(), v),
                            opts.solver);
  };
  const double best = revenue_at(refined) >= revenue_at(coarse) ? refined : coarse;
  RewardSolution sol = evaluate_reward(inst, influence, Regime::kUniform,
                                       RewardVector::uniform(inst.size(), best), opts);
  sol.warnings.push_back("closed-form uniform reward " + format_value(closed) +
                         " is negative; re-optimized on r >= 0");
  return sol;
}

RewardSolution bound_reward(const MarketInstance& inst, const ExpectationProfile& exp,
                            const RewardOptions& opts) {
  const double r = incomplete_info_bound(inst.graph(), inst.params(), exp);
  const InfluenceOperator influence(inst);
  return evaluate_reward(inst, influence, Regime::kUniformBound,
                         RewardVector::uniform(inst.size(), r), opts);
}

double average_discriminatory_reward(const MarketInstance& inst) {
  return discriminatory_schedule(inst).mean();
}

namespace {

double bound_expression(const SocialGraph& graph, const MarketParams& p, double a_bar,
                        const Eigen::VectorXd& b) {
  const auto n = static_cast<Eigen::Index>(graph.size());
  // 2 B - 2 G + 2 mu t I with B = diag(2 b_i).
  Eigen::MatrixXd m = -2.0 * graph.weights();
  m.diagonal() += 4.0 * b;
  m.diagonal().array() += 2.0 * p.mu * p.t;
  const DenseSolver solver(std::move(m), "2 E_b[B] - 2G + 2 mu t I");
  const double quad = solver.solve(Eigen::VectorXd::Ones(n)).sum();
  return 0.5 * (p.c - a_bar) + 0.5 * p.mu * p.s -
         (p.mu * p.t / static_cast<double>(n)) * (p.mu * p.s + a_bar - p.c) * quad;
}

}  // namespace

double incomplete_info_bound(const SocialGraph& graph, const MarketParams& params,
                             const ExpectationProfile& exp) {
  params.validate();
  exp.validate();
  if (graph.size() == 0) throw InvariantError("incomplete_info_bound needs N >= 1");
  if (params.c < exp.e_a + params.mu * params.s) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << "Assumption 2 violated: c = " << params.c << " < E[a] + mu s = "
       << exp.e_a + params.mu * params.s << "; the bound direction is not guaranteed";
    throw SolverError(os.str());
  }
  const Eigen::VectorXd b =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(graph.size()), exp.e_b);
  return bound_expression(graph, params, exp.e_a, b);
}

double single_reward_for_draw(const SocialGraph& graph, const MarketParams& params,
                              double a_bar, const Eigen::VectorXd& b) {
  if (static_cast<std::size_t>(b.size()) != graph.size()) {
    throw InvariantError("b draw has length " + std::to_string(b.size()) +
                         " but the graph has " + std::to_string(graph.size()) + " users");
  }
  return bound_expression(graph, params, a_bar, b);
}

}  // namespace crowdmarket
