#pragma once

namespace sparsekit {

/// Number of OpenMP threads the toolkit's parallel kernels may use.
/// 0 means run every kernel serially. Initialized from SPARSEKIT_THREADS,
/// otherwise from the OpenMP default.
int thread_limit();

/// Overrides the limit for the remainder of the process (0 = serial).
void set_thread_limit(int threads);

/// True when a kernel should fan out: limit above 1 and not already inside a
/// parallel region (nested regions always run serially).
bool should_parallelize();

}  // namespace sparsekit
