#pragma once

// OpenMP helpers. Every parallel kernel in the library has a serial twin in the
// owning module's `serial` namespace that produces bit-identical results.

namespace firesig {

/// Worker count for parallel kernels: omp_get_max_threads() capped by the
/// FIRESIG_THREADS environment variable when it is set to a positive integer.
int max_threads();

/// Override the worker count (0 restores the environment default).
void set_max_threads(int n);

}  // namespace firesig
