// Serial reference vs OpenMP kernels: batch sampling, exhaustive oracle, sweep.
// Prints wall time for both and whether the outputs agree bit for bit.

#include "sparsekit/bench.hpp"
#include "sparsekit/ce.hpp"
#include "sparsekit/parallel.hpp"
#include "sparsekit/synth.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace sparsekit;

namespace {

/// Best of `repeat` wall-clock timings.
double best_time(int repeat, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < repeat; ++i) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-18s %12.6f %12.6f %8.2fx %10s\n", name, serial, parallel, serial / parallel,
                identical ? "yes" : "NO");
}

bool same_batches(const std::vector<MaskSample>& a, const std::vector<MaskSample>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool cost_equal = a[i].cost == b[i].cost || (std::isinf(a[i].cost) && std::isinf(b[i].cost));
        if (a[i].y != b[i].y || !cost_equal) return false;
    }
    return true;
}

std::string records_text(std::vector<BenchRecord> records) {
    for (auto& r : records) r.runtime_seconds = 0.0;
    std::ostringstream out;
    write_records(out, records);
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial vs OpenMP kernel timings"};
    int threads = std::max(omp_get_num_procs(), 2);
    int repeat = 3;
    bool quick = false;
    app.add_option("--threads", threads, "Threads for the parallel runs")->check(CLI::PositiveNumber);
    app.add_option("--repeat", repeat, "Timing repetitions (best is reported)")->check(CLI::PositiveNumber);
    app.add_flag("--quick", quick, "Small problem sizes");
    CLI11_PARSE(app, argc, argv);

    const int n = quick ? 16 : 64;
    const int m = quick ? 64 : 1024;
    const int batch = quick ? 100 : 2000;
    const Dictionary dict = gen_dictionary(n, m, 1);
    const Vector x = gen_instance(dict, 8, 2).signal;
    const Vector p = Vector::Constant(m, 8.0 / m);
    const Rng stream(3);

    std::printf("processors %d, parallel threads %d\n", omp_get_num_procs(), threads);
    std::printf("%-18s %12s %12s %9s %10s\n", "kernel", "serial_s", "openmp_s", "speedup", "identical");

    {
        std::vector<MaskSample> serial, parallel;
        const double ts = best_time(repeat, [&] { serial = sample_batch_serial(dict, x, p, batch, stream, 0.0); });
        set_thread_limit(threads);
        const double tp = best_time(repeat, [&] { parallel = sample_batch(dict, x, p, batch, stream, 0.0); });
        row("sample_batch", ts, tp, same_batches(serial, parallel));
    }
    {
        const int on = quick ? 10 : 14, om = quick ? 20 : 32, ok = quick ? 3 : 4;
        const Dictionary small = gen_dictionary(on, om, 5);
        const Vector y = gen_instance(small, ok, 6).signal;
        SparseSolution serial, parallel;
        const double ts = best_time(repeat, [&] { serial = exhaustive_oracle_serial(small, y, ok); });
        set_thread_limit(threads);
        const double tp = best_time(repeat, [&] { parallel = exhaustive_oracle(small, y, ok); });
        row("exhaustive_oracle", ts, tp, serial.support == parallel.support && serial.values == parallel.values);
    }
    {
        SweepConfig cfg;
        cfg.n = quick ? 12 : 32;
        cfg.values = quick ? std::vector<int>{24} : std::vector<int>{64, 128};
        cfg.fixed = 3;
        cfg.matrices_per_point = quick ? 2 : 5;
        cfg.vectors_per_matrix = quick ? 2 : 5;
        cfg.algorithms = {Algorithm::sp, Algorithm::ce, Algorithm::sce};
        std::string serial, parallel;
        set_thread_limit(0);
        const double ts = best_time(repeat, [&] { serial = records_text(run_sweep(cfg).records); });
        set_thread_limit(threads);
        const double tp = best_time(repeat, [&] { parallel = records_text(run_sweep(cfg).records); });
        row("run_sweep", ts, tp, serial == parallel);
    }
    return 0;
}
