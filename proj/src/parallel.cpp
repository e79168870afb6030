#include "sparsekit/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace sparsekit {

namespace {

int initial_limit() {
    if (const char* env = std::getenv("SPARSEKIT_THREADS")) {
        try {
            const int value = std::stoi(env);
            return value < 0 ? 0 : value;
        } catch (const std::exception&) {
            // fall through to the OpenMP default
        }
    }
    return omp_get_max_threads();
}

std::atomic<int>& limit_storage() {
    static std::atomic<int> limit{initial_limit()};
    return limit;
}

}  // namespace

int thread_limit() { return limit_storage().load(std::memory_order_relaxed); }

void set_thread_limit(int threads) {
    limit_storage().store(threads < 0 ? 0 : threads, std::memory_order_relaxed);
}

bool should_parallelize() { return thread_limit() > 1 && !omp_in_parallel(); }

}  // namespace sparsekit
