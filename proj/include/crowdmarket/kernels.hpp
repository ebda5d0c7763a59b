#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP variant that must produce bit-identical results; the equilibrium
// and oracle code pick one through `Execution`.

#include <cstddef>
#include <functional>
#include <span>

namespace crowdmarket::kernels {

enum class Execution { kSerial, kParallel, kAuto };

/// Below this many users kAuto stays serial.
inline constexpr std::size_t kParallelThreshold = 256;

bool use_parallel(Execution policy, std::size_t work_items);

/// Read-only operands of one simultaneous best-response sweep.
struct SweepOperands {
  std::span<const double> weights;  // row-major n x n tie matrix
  std::span<const double> drive;    // r_i - c + a_i
  std::span<const double> two_b;    // 2 b_i
  std::size_t n = 0;
};

/// max{0, (drive_i + sum_j g_ij x_j) / (2 b_i)}. Both sweep variants call
/// this, so every coordinate is evaluated in the same operation order.
inline double best_response_row(const SweepOperands& ops, std::size_t i,
                                std::span<const double> x) {
  const double* row = ops.weights.data() + i * ops.n;
  double social = 0.0;
  for (std::size_t j = 0; j < ops.n; ++j) social += row[j] * x[j];
  const double value = (ops.drive[i] + social) / ops.two_b[i];
  return value > 0.0 ? value : 0.0;
}

void best_response_sweep_serial(const SweepOperands& ops, std::span<const double> x,
                                std::span<double> out);
void best_response_sweep_omp(const SweepOperands& ops, std::span<const double> x,
                             std::span<double> out);
void best_response_sweep(Execution policy, const SweepOperands& ops,
                         std::span<const double> x, std::span<double> out);

double l1_distance(std::span<const double> x, std::span<const double> y);
double linf_distance(std::span<const double> x, std::span<const double> y);

struct ArgmaxResult {
  std::size_t index = 0;
  double value = 0.0;
};

/// Argmax of score(k) over k in [0, count). Ties go to the lowest index and
/// NaN scores never win. `score` must be safe to call concurrently.
ArgmaxResult grid_argmax_serial(std::size_t count,
                                const std::function<double(std::size_t)>& score);
ArgmaxResult grid_argmax_omp(std::size_t count,
                             const std::function<double(std::size_t)>& score);
ArgmaxResult grid_argmax(Execution policy, std::size_t count,
                         const std::function<double(std::size_t)>& score);

}  // namespace crowdmarket::kernels
