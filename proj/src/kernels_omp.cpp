#include <cmath>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "crowdmarket/kernels.hpp"

namespace crowdmarket::kernels {

void best_response_sweep_omp(const SweepOperands& ops, std::span<const double> x,
                             std::span<double> out) {
  const auto n = static_cast<long long>(ops.n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        best_response_row(ops, static_cast<std::size_t>(i), x);
  }
}

ArgmaxResult grid_argmax_omp(std::size_t count,
                             const std::function<double(std::size_t)>& score) {
  if (count == 0) throw std::invalid_argument("grid_argmax over an empty grid");
  const int threads = omp_get_max_threads();
  // One slot per thread; index == count marks "nothing found".
  std::vector<ArgmaxResult> local(static_cast<std::size_t>(threads),
                                  ArgmaxResult{count, -INFINITY});
  const auto total = static_cast<long long>(count);

#pragma omp parallel num_threads(threads)
  {
    ArgmaxResult mine{count, -INFINITY};
#pragma omp for schedule(static)
    for (long long k = 0; k < total; ++k) {
      const double v = score(static_cast<std::size_t>(k));
      if (std::isnan(v)) continue;
      if (mine.index == count || v > mine.value) mine = {static_cast<std::size_t>(k), v};
    }
    local[static_cast<std::size_t>(omp_get_thread_num())] = mine;
  }

  // Static chunks are ordered by thread id, but compare indices anyway so the
  // lowest-index rule never depends on the schedule.
  ArgmaxResult best{count, -INFINITY};
  for (const ArgmaxResult& r : local) {
    if (r.index == count) continue;
    if (best.index == count || r.value > best.value ||
        (r.value == best.value && r.index < best.index)) {
      best = r;
    }
  }
  if (best.index == count) best = {0, std::nan("")};
  return best;
}

}  // namespace crowdmarket::kernels
