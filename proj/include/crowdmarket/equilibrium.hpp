#pragma once

// Stage-II participation equilibrium. Two independent routes: simultaneous
// best-response iteration and the interior closed form x = K (a + r - c 1).

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "crowdmarket/influence.hpp"
#include "crowdmarket/kernels.hpp"
#include "crowdmarket/market.hpp"

namespace crowdmarket {

struct SolverConfig {
  /// L1 distance between successive iterates that ends the iteration.
  double epsilon = 1e-9;
  std::size_t max_iter = 100000;
  /// Replaces the default start (x[0] = 0, x[1] = (1 + epsilon) 1).
  std::optional<Eigen::VectorXd> warm_start;
  kernels::Execution execution = kernels::Execution::kAuto;
  /// Called after every sweep with the sweep number and the new iterate.
  std::function<void(std::size_t, const Eigen::VectorXd&)> observer;

  void validate() const;
};

enum class SolveMethod { kBestResponse, kClosedForm };
std::string_view to_string(SolveMethod method);

struct EquilibriumResult {
  ParticipationProfile x;
  SolveMethod method = SolveMethod::kBestResponse;
  /// Sweeps performed; 0 for the closed form.
  std::size_t iterations = 0;
  /// Every x_i > 0.
  bool interior = false;
  /// Best response: the L1 stopping rule was met. Closed form: the solution
  /// is interior, hence a genuine equilibrium.
  bool converged = false;
  /// max_i |x_i - BR_i(x)|.
  double residual = 0.0;
  bool assumption1_holds = true;
  std::vector<std::string> warnings;
};

/// max{0, (r_i - c + a_i) / (2 b_i) + sum_j g_ij x_j / (2 b_i)}.
double best_response(const MarketInstance& inst, std::size_t i,
                     const Eigen::VectorXd& x, const RewardVector& r);
/// All N best responses against the same profile.
Eigen::VectorXd best_response_map(const MarketInstance& inst, const Eigen::VectorXd& x,
                                  const RewardVector& r);
/// max_i |x_i - BR_i(x)|.
double fixed_point_residual(const MarketInstance& inst, const Eigen::VectorXd& x,
                            const RewardVector& r);

/// Simultaneous best-response updating until ||x[k] - x[k-1]||_1 <= epsilon
/// or max_iter sweeps. Never loops forever; a violated Assumption 1 is
/// reported through `assumption1_holds` and a warning, not an exception.
EquilibriumResult solve_br_dynamics(const MarketInstance& inst, const RewardVector& r,
                                    const SolverConfig& cfg = {});

/// Solves (B - G) x = a + r - c 1. A non-interior solution is returned as is
/// (not projected) with interior = converged = false.
EquilibriumResult solve_closed_form(const MarketInstance& inst, const RewardVector& r);
EquilibriumResult solve_closed_form(const MarketInstance& inst,
                                    const InfluenceOperator& influence,
                                    const RewardVector& r);

/// The interior closed form when it exists, best-response dynamics otherwise.
EquilibriumResult solve_equilibrium(const MarketInstance& inst,
                                    const InfluenceOperator& influence,
                                    const RewardVector& r, const SolverConfig& cfg = {});

/// ||x_closed - x_br||_inf. Requires Assumption 1 and an interior closed form.
double cross_validate(const MarketInstance& inst, const RewardVector& r,
                      const SolverConfig& cfg = {});

}  // namespace crowdmarket
