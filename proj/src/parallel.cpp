#include "crowdmarket/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

#include <omp.h>

namespace crowdmarket {

int apply_thread_cap_from_env() {
  const char* value = std::getenv("CROWDMARKET_THREADS");
  if (value != nullptr) {
    int cap = 0;
    const char* end = value + std::strlen(value);
    const auto [ptr, ec] = std::from_chars(value, end, cap);
    if (ec == std::errc() && ptr == end && cap > 0) omp_set_num_threads(cap);
  }
  return omp_get_max_threads();
}

}  // namespace crowdmarket
