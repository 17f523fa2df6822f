#pragma once

namespace agequeue {

/// Worker count for parallel kernels: the OpenMP default, capped by the
/// AGEQUEUE_THREADS environment variable when it holds a positive integer.
int worker_count();

}  // namespace agequeue
