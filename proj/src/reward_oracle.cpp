// Grid and finite-difference oracles for the reward closed forms. They only
// ever score rewards through the equilibrium solvers, never through the
// closed-form reward expressions.

#include <cmath>
#include <sstream>

#include "crowdmarket/error.hpp"
#include "crowdmarket/reward.hpp"

namespace crowdmarket {
namespace {

void check_range(RewardRange range, std::size_t steps) {
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || range.lo > range.hi) {
    std::ostringstream os;
    os << "invalid reward range [" << range.lo << ", " << range.hi << "]";
    throw InvariantError(os.str());
  }
  if (steps < 2) throw InvariantError("grid search needs at least 2 steps");
}

double grid_point(RewardRange range, std::size_t steps, std::size_t k) {
  if (k + 1 == steps) return range.hi;
  return range.lo + (range.hi - range.lo) * static_cast<double>(k) /
                        static_cast<double>(steps - 1);
}

}  // namespace

double brute_force_uniform(const MarketInstance& inst, RewardRange range, std::size_t steps,
                           const RewardOptions& opts) {
  check_range(range, steps);
  const InfluenceOperator influence(inst);
  const std::size_t n = inst.size();
  const auto best = kernels::grid_argmax(opts.execution, steps, [&](std::size_t k) {
    return realized_revenue(inst, influence,
                            RewardVector::uniform(n, grid_point(range, steps, k)),
                            opts.solver);
  });
  return grid_point(range, steps, best.index);
}

double golden_section_uniform(const MarketInstance& inst, RewardRange range,
                              double tolerance, const RewardOptions& opts) {
  check_range(range, 2);
  const InfluenceOperator influence(inst);
  const std::size_t n = inst.size();
  const auto revenue = [&](double r) {
    return realized_revenue(inst, influence, RewardVector::uniform(n, r), opts.solver);
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = range.lo;
  double hi = range.hi;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = revenue(x1);
  double f2 = revenue(x2);
  while (hi - lo > tolerance) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = revenue(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = revenue(x2);
    }
  }
  return 0.5 * (lo + hi);
}

RewardVector brute_force_discriminatory(const MarketInstance& inst, RewardRange range,
                                        std::size_t steps, const RewardOptions& opts) {
  check_range(range, steps);
  const std::size_t n = inst.size();
  if (n > kDiscriminatoryOracleMaxUsers) {
    throw InvariantError("brute_force_discriminatory refuses N = " + std::to_string(n) +
                         " (grid explodes beyond N = " +
                         std::to_string(kDiscriminatoryOracleMaxUsers) + ")");
  }
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= steps;

  const InfluenceOperator influence(inst);
  const auto decode = [&](std::size_t flat) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      r(static_cast<Eigen::Index>(i)) = grid_point(range, steps, flat % steps);
      flat /= steps;
    }
    return RewardVector(std::move(r));
  };
  const auto best = kernels::grid_argmax(opts.execution, count, [&](std::size_t k) {
    return realized_revenue(inst, influence, decode(k), opts.solver);
  });
  return decode(best.index);
}

Eigen::VectorXd revenue_gradient(const MarketInstance& inst, const RewardVector& r, double h,
                                 const SolverConfig& solver) {
  const InfluenceOperator influence(inst);
  Eigen::VectorXd grad(static_cast<Eigen::Index>(inst.size()));
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    Eigen::VectorXd up = r.values();
    Eigen::VectorXd down = r.values();
    up(i) += h;
    down(i) -= h;
    grad(i) = (realized_revenue(inst, influence, RewardVector(up), solver) -
               realized_revenue(inst, influence, RewardVector(down), solver)) /
              (2.0 * h);
  }
  return grad;
}

double uniform_revenue_derivative(const MarketInstance& inst, double r, double h,
                                  const SolverConfig& solver) {
  const InfluenceOperator influence(inst);
  const std::size_t n = inst.size();
  return (realized_revenue(inst, influence, RewardVector::uniform(n, r + h), solver) -
          realized_revenue(inst, influence, RewardVector::uniform(n, r - h), solver)) /
         (2.0 * h);
}

Eigen::MatrixXd revenue_hessian(const MarketInstance& inst, const RewardVector& r, double h,
                                const SolverConfig& solver) {
  const InfluenceOperator influence(inst);
  const auto n = static_cast<Eigen::Index>(inst.size());
  const auto at = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
    Eigen::VectorXd p = r.values();
    p(i) += di;
    p(j) += dj;
    return realized_revenue(inst, influence, RewardVector(std::move(p)), solver);
  };
  Eigen::MatrixXd hess(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double value =
          (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) /
          (4.0 * h * h);
      hess(i, j) = value;
      hess(j, i) = value;
    }
  }
  return hess;
}

}  // namespace crowdmarket
