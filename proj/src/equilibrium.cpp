#include "crowdmarket/equilibrium.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "crowdmarket/error.hpp"

namespace crowdmarket {
namespace {

void check_reward(const MarketInstance& inst, const RewardVector& r) {
  if (r.size() != inst.size()) {
    std::ostringstream os;
    os << "reward has length " << r.size() << " but the instance has " << inst.size()
       << " users";
    throw InvariantError(os.str());
  }
}

Eigen::VectorXd drive_vector(const MarketInstance& inst, const RewardVector& r) {
  return (r.values().array() - inst.params().c + inst.a().array()).matrix();
}

kernels::SweepOperands operands(const MarketInstance& inst, const Eigen::VectorXd& drive) {
  const auto& w = inst.graph().weights();
  const std::size_t n = inst.size();
  return kernels::SweepOperands{
      std::span<const double>(w.data(), n * n),
      std::span<const double>(drive.data(), n),
      std::span<const double>(inst.two_b().data(), n),
      n,
  };
}

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::span<double> view(Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

void SolverConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvariantError("solver epsilon must be > 0");
  }
  if (max_iter < 1) throw InvariantError("solver max_iter must be >= 1");
}

std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::kBestResponse: return "best-response";
    case SolveMethod::kClosedForm: return "closed-form";
  }
  return "unknown";
}

double best_response(const MarketInstance& inst, std::size_t i, const Eigen::VectorXd& x,
                     const RewardVector& r) {
  if (i >= inst.size()) {
    throw InvariantError("user index " + std::to_string(i) + " out of range for " +
                         std::to_string(inst.size()) + " users");
  }
  check_reward(inst, r);
  if (static_cast<std::size_t>(x.size()) != inst.size()) {
    throw InvariantError("participation has length " + std::to_string(x.size()) +
                         " but the instance has " + std::to_string(inst.size()) +
                         " users");
  }
  const Eigen::VectorXd drive = drive_vector(inst, r);
  return kernels::best_response_row(operands(inst, drive), i, view(x));
}

Eigen::VectorXd best_response_map(const MarketInstance& inst, const Eigen::VectorXd& x,
                                  const RewardVector& r) {
  check_reward(inst, r);
  if (static_cast<std::size_t>(x.size()) != inst.size()) {
    throw InvariantError("participation has length " + std::to_string(x.size()) +
                         " but the instance has " + std::to_string(inst.size()) +
                         " users");
  }
  const Eigen::VectorXd drive = drive_vector(inst, r);
  Eigen::VectorXd out(x.size());
  kernels::best_response_sweep_serial(operands(inst, drive), view(x), view(out));
  return out;
}

double fixed_point_residual(const MarketInstance& inst, const Eigen::VectorXd& x,
                            const RewardVector& r) {
  return (x - best_response_map(inst, x, r)).cwiseAbs().maxCoeff();
}

EquilibriumResult solve_br_dynamics(const MarketInstance& inst, const RewardVector& r,
                                    const SolverConfig& cfg) {
  cfg.validate();
  check_reward(inst, r);
  const auto n = static_cast<Eigen::Index>(inst.size());

  EquilibriumResult result;
  result.method = SolveMethod::kBestResponse;
  result.assumption1_holds = check_assumption1(inst).holds;
  if (!result.assumption1_holds) {
    result.warnings.emplace_back(
        "Assumption 1 violated: best-response convergence is not guaranteed");
  }

  const Eigen::VectorXd drive = drive_vector(inst, r);
  const kernels::SweepOperands ops = operands(inst, drive);

  Eigen::VectorXd prev;
  Eigen::VectorXd cur;
  std::size_t sweeps = 0;
  if (cfg.warm_start) {
    if (cfg.warm_start->size() != n) {
      throw InvariantError("warm start has length " + std::to_string(cfg.warm_start->size()) +
                           " but the instance has " + std::to_string(n) + " users");
    }
    prev = *cfg.warm_start;
    cur.resize(n);
    kernels::best_response_sweep(cfg.execution, ops, view(prev), view(cur));
    sweeps = 1;
    if (cfg.observer) cfg.observer(sweeps, cur);
  } else {
    prev = Eigen::VectorXd::Zero(n);
    cur = Eigen::VectorXd::Constant(n, 1.0 + cfg.epsilon);
  }

  Eigen::VectorXd next(n);
  bool diverged = false;
  while (kernels::l1_distance(view(cur), view(prev)) > cfg.epsilon) {
    if (sweeps >= cfg.max_iter) break;
    kernels::best_response_sweep(cfg.execution, ops, view(cur), view(next));
    prev.swap(cur);
    cur.swap(next);
    ++sweeps;
    if (cfg.observer) cfg.observer(sweeps, cur);
    if (!cur.allFinite()) {
      diverged = true;
      break;
    }
  }

  result.iterations = sweeps;
  result.converged = !diverged && kernels::l1_distance(view(cur), view(prev)) <= cfg.epsilon;
  if (diverged) {
    result.warnings.emplace_back("best-response iterates diverged after " +
                                 std::to_string(sweeps) + " sweeps");
    result.residual = INFINITY;
  } else {
    Eigen::VectorXd image(n);
    kernels::best_response_sweep(cfg.execution, ops, view(cur), view(image));
    result.residual = kernels::linf_distance(view(cur), view(image));
  }
  if (!result.converged && !diverged) {
    result.warnings.emplace_back("best-response dynamics did not converge within " +
                                 std::to_string(cfg.max_iter) + " sweeps");
  }
  result.interior = cur.allFinite() && (cur.array() > 0.0).all();
  result.x = ParticipationProfile(std::move(cur));
  return result;
}

EquilibriumResult solve_closed_form(const MarketInstance& inst, const RewardVector& r) {
  return solve_closed_form(inst, InfluenceOperator(inst), r);
}

EquilibriumResult solve_closed_form(const MarketInstance& inst,
                                    const InfluenceOperator& influence,
                                    const RewardVector& r) {
  check_reward(inst, r);
  EquilibriumResult result;
  result.method = SolveMethod::kClosedForm;
  result.assumption1_holds = check_assumption1(inst).holds;

  Eigen::VectorXd x = influence.apply(drive_vector(inst, r));
  if (!x.allFinite()) throw SolverError("closed-form solve produced non-finite values");
  result.interior = (x.array() > 0.0).all();
  result.converged = result.interior;
  result.residual = fixed_point_residual(inst, x, r);
  if (!result.interior) {
    result.warnings.emplace_back(
        "closed-form solution is not interior: it is not an equilibrium");
  }
  result.x = ParticipationProfile(std::move(x));
  return result;
}

EquilibriumResult solve_equilibrium(const MarketInstance& inst,
                                    const InfluenceOperator& influence,
                                    const RewardVector& r, const SolverConfig& cfg) {
  EquilibriumResult closed = solve_closed_form(inst, influence, r);
  if (closed.interior) return closed;
  return solve_br_dynamics(inst, r, cfg);
}

double cross_validate(const MarketInstance& inst, const RewardVector& r,
                      const SolverConfig& cfg) {
  if (!check_assumption1(inst).holds) {
    throw SolverError("cross_validate requires Assumption 1 to hold");
  }
  const EquilibriumResult closed = solve_closed_form(inst, r);
  if (!closed.interior) {
    throw SolverError("cross_validate requires an interior closed-form solution");
  }
  const EquilibriumResult br = solve_br_dynamics(inst, r, cfg);
  if (!br.converged) throw SolverError("best-response dynamics did not converge");
  return (closed.x.values() - br.x.values()).cwiseAbs().maxCoeff();
}

}  // namespace crowdmarket
