#pragma once

namespace reductcheck {

/// Caps OpenMP parallelism at the value of REDUCTCHECK_THREADS when it is set
/// to a positive integer. Returns the thread count now in effect.
int configure_threads_from_env();

/// Threads available to the next parallel region.
int max_threads();

} // namespace reductcheck
