#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crowdmarket/kernels.hpp"

namespace crowdmarket::kernels {

bool use_parallel(Execution policy, std::size_t work_items) {
  switch (policy) {
    case Execution::kSerial: return false;
    case Execution::kParallel: return true;
    case Execution::kAuto: return work_items >= kParallelThreshold;
  }
  return false;
}

void best_response_sweep_serial(const SweepOperands& ops, std::span<const double> x,
                                std::span<double> out) {
  for (std::size_t i = 0; i < ops.n; ++i) out[i] = best_response_row(ops, i, x);
}

void best_response_sweep(Execution policy, const SweepOperands& ops,
                         std::span<const double> x, std::span<double> out) {
  if (use_parallel(policy, ops.n)) {
    best_response_sweep_omp(ops, x, out);
  } else {
    best_response_sweep_serial(ops, x, out);
  }
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i] - y[i]);
  return sum;
}

double linf_distance(std::span<const double> x, std::span<const double> y) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) best = std::max(best, std::abs(x[i] - y[i]));
  return best;
}

ArgmaxResult grid_argmax_serial(std::size_t count,
                                const std::function<double(std::size_t)>& score) {
  if (count == 0) throw std::invalid_argument("grid_argmax over an empty grid");
  ArgmaxResult best{0, -INFINITY};
  bool found = false;
  for (std::size_t k = 0; k < count; ++k) {
    const double v = score(k);
    if (std::isnan(v)) continue;
    if (!found || v > best.value) {
      best = {k, v};
      found = true;
    }
  }
  if (!found) best = {0, std::nan("")};
  return best;
}

ArgmaxResult grid_argmax(Execution policy, std::size_t count,
                         const std::function<double(std::size_t)>& score) {
  // Grid points are expensive (each is an equilibrium solve), so any grid
  // that is not tiny is worth splitting.
  if (use_parallel(policy, count * 64)) return grid_argmax_omp(count, score);
  return grid_argmax_serial(count, score);
}

}  // namespace crowdmarket::kernels
