#pragma once

namespace crowdmarket {

/// Caps OpenMP threads at CROWDMARKET_THREADS when it is set to a positive
/// integer. Returns the resulting maximum thread count.
int apply_thread_cap_from_env();

}  // namespace crowdmarket
