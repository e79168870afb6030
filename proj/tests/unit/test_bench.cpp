#include "sparsekit/bench.hpp"
#include "sparsekit/errors.hpp"
#include "support/test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace sparsekit;
using sparsekit::testing::ThreadLimitGuard;

namespace {

SweepConfig tiny_sweep() {
    SweepConfig cfg;
    cfg.n = 16;
    cfg.values = {24, 40};
    cfg.fixed = 3;
    cfg.algorithms = {Algorithm::mp, Algorithm::omp, Algorithm::sp, Algorithm::ce, Algorithm::sce};
    cfg.matrices_per_point = 2;
    cfg.vectors_per_matrix = 3;
    cfg.base_seed = 5;
    cfg.per_algorithm[Algorithm::ce].population = 100;
    cfg.per_algorithm[Algorithm::ce].max_iters = 10;
    return cfg;
}

std::string records_text(const std::vector<BenchRecord>& records, bool blank_runtime) {
    std::vector<BenchRecord> copy = records;
    if (blank_runtime)
        for (auto& r : copy) r.runtime_seconds = 0.0;
    std::ostringstream out;
    write_records(out, copy);
    return out.str();
}

BenchRecord record(Algorithm a, int m, double runtime, bool exact, double overlap_value) {
    BenchRecord r;
    r.algorithm = a;
    r.n = 8;
    r.m = m;
    r.k = 2;
    r.runtime_seconds = runtime;
    r.exact_recovery = exact;
    r.support_overlap = overlap_value;
    r.bottom_up_transfers = 10;
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("algorithm names") {
    for (Algorithm a : {Algorithm::mp, Algorithm::omp, Algorithm::sp, Algorithm::ce, Algorithm::sce})
        CHECK(parse_algorithm(algorithm_name(a)) == a);
    CHECK_THROWS_AS(parse_algorithm("l1"), InvalidArgument);
}

TEST_CASE("solver configs follow the benchmark defaults") {
    const SolverOverrides none;
    CHECK(ce_config(8, none).population == 500);
    CHECK(ce_config(8, none).expected_k == 8);
    CHECK(sce_config(8, none).inner.step_size == 0.9);
    CHECK(sce_config(8, none).inner.max_iters == 6);
    CHECK(pursuit_config(8, none).k == 8);

    SolverOverrides o;
    o.alpha = 0.5;
    o.inner_iters = 3;
    o.outer_iters = 4;
    o.k = 5;
    const SCEConfig s = sce_config(8, o);
    CHECK(s.inner.step_size == 0.5);
    CHECK(s.inner.max_iters == 3);
    CHECK(s.outer_iters == 4);
    CHECK(s.k == 5);

    SolverOverrides a, b;
    a.alpha = 0.2;
    a.population = 10;
    b.alpha = 0.3;
    const SolverOverrides merged = a.merged_with(b);
    CHECK(*merged.alpha == 0.3);
    CHECK(*merged.population == 10);
}

TEST_CASE("degenerate sweep yields one record") {
    SweepConfig cfg;
    cfg.n = 8;
    cfg.values = {12};
    cfg.fixed = 2;
    cfg.algorithms = {Algorithm::sp};
    cfg.matrices_per_point = 1;
    cfg.vectors_per_matrix = 1;
    const SweepResult result = run_sweep(cfg);
    REQUIRE(result.records.size() == 1);
    const BenchRecord& r = result.records[0];
    CHECK(r.n == 8);
    CHECK(r.m == 12);
    CHECK(r.k == 2);
    CHECK(r.matrix_seed == matrix_seed(cfg.base_seed, 0, 0));
    CHECK(r.vector_seed == vector_seed(r.matrix_seed, 0, 0));
}

TEST_CASE("sweep records are canonical and internally consistent") {
    const SweepConfig cfg = tiny_sweep();
    const SweepResult result = run_sweep(cfg);
    CHECK(result.records.size() == 5 * 2 * 2 * 3);
    std::size_t i = 0;
    for (Algorithm a : cfg.algorithms) {
        for (std::size_t point = 0; point < 2; ++point) {
            for (std::size_t mi = 0; mi < 2; ++mi) {
                std::set<std::uint64_t> vector_seeds;
                for (std::size_t vi = 0; vi < 3; ++vi, ++i) {
                    const BenchRecord& r = result.records[i];
                    CHECK(r.algorithm == a);
                    CHECK(r.m == cfg.values[point]);
                    CHECK(r.matrix_seed == matrix_seed(cfg.base_seed, point, mi));
                    vector_seeds.insert(r.vector_seed);
                    CHECK(std::isfinite(r.residual_norm));
                    CHECK(r.support_overlap >= 0.0);
                    CHECK(r.support_overlap <= 1.0);
                    if (r.exact_recovery) CHECK(r.support_overlap == 1.0);
                    CHECK(r.bottom_up_transfers % (16 * r.m) == 0);
                }
                CHECK(vector_seeds.size() == 3);
            }
        }
    }
    // Same instance for every algorithm.
    for (std::size_t t = 0; t < 12; ++t)
        for (std::size_t a = 1; a < 5; ++a) CHECK(result.records[a * 12 + t].vector_seed == result.records[t].vector_seed);
}

TEST_CASE("sweeps are reproducible and schedule independent") {
    const SweepConfig cfg = tiny_sweep();
    std::string serial;
    {
        ThreadLimitGuard guard(0);
        serial = records_text(run_sweep(cfg).records, true);
    }
    ThreadLimitGuard guard(4);
    CHECK(records_text(run_sweep(cfg).records, true) == serial);
    CHECK(records_text(run_sweep(cfg).records, true) == serial);
}

TEST_CASE("supports are distinct within a matrix") {
    SweepConfig cfg;
    cfg.n = 4;
    cfg.values = {5};
    cfg.fixed = 1;
    cfg.algorithms = {Algorithm::omp};
    cfg.matrices_per_point = 1;
    cfg.vectors_per_matrix = 5;
    const SweepResult result = run_sweep(cfg);
    std::set<std::uint64_t> seeds;
    for (const auto& r : result.records) {
        seeds.insert(r.vector_seed);
        CHECK(r.exact_recovery);
    }
    CHECK(seeds.size() == 5);
}

TEST_CASE("solver errors become non-converged records") {
    SweepConfig cfg;
    cfg.n = 6;
    cfg.values = {10};
    cfg.fixed = 4;  // SP needs 2k <= n
    cfg.algorithms = {Algorithm::sp};
    cfg.matrices_per_point = 1;
    cfg.vectors_per_matrix = 2;
    const SweepResult result = run_sweep(cfg);
    REQUIRE(result.records.size() == 2);
    for (const auto& r : result.records) {
        CHECK_FALSE(r.converged);
        CHECK_FALSE(r.exact_recovery);
        CHECK(r.residual_norm > 0.0);
    }
}

TEST_CASE("invalid sweeps are rejected") {
    SweepConfig cfg;
    cfg.values = {};
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = SweepConfig{};
    cfg.fixed = 2000;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = SweepConfig{};
    cfg.algorithms.clear();
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("aggregate examples") {
    const auto one = aggregate({record(Algorithm::sp, 16, 0.5, true, 1.0)}, SweepAxis::m);
    REQUIRE(one.size() == 1);
    CHECK(one[0].mean_runtime == 0.5);
    CHECK(one[0].std_runtime == 0.0);
    CHECK(one[0].good_solution_ratio == 1.0);

    const auto two =
        aggregate({record(Algorithm::sp, 16, 1.0, true, 1.0), record(Algorithm::sp, 16, 3.0, false, 0.5)}, SweepAxis::m);
    REQUIRE(two.size() == 1);
    CHECK(two[0].mean_runtime == 2.0);
    CHECK(two[0].std_runtime == 1.0);
    CHECK(two[0].good_solution_ratio == 0.5);
    CHECK(two[0].mean_overlap == 0.75);

    CHECK_THROWS_AS(aggregate({}, SweepAxis::m), EmptyGroup);

    const auto grouped = aggregate({record(Algorithm::ce, 32, 1, true, 1), record(Algorithm::sp, 16, 1, true, 1),
                                    record(Algorithm::ce, 16, 1, true, 1), record(Algorithm::ce, 32, 1, true, 1)},
                                   SweepAxis::m);
    REQUIRE(grouped.size() == 3);
    CHECK(grouped[0].algorithm == "ce");
    CHECK(grouped[0].sweep_value == 32);
    CHECK(grouped[1].algorithm == "sp");
    CHECK(grouped[2].sweep_value == 16);
    CHECK(aggregate({record(Algorithm::sp, 16, 1, true, 1)}, SweepAxis::k)[0].sweep_value == 2);
}

TEST_CASE("aggregates match a recomputation from the persisted records") {
    SweepConfig cfg = tiny_sweep();
    cfg.algorithms = {Algorithm::omp, Algorithm::sp};
    cfg.values = {24};
    cfg.matrices_per_point = 10;
    cfg.vectors_per_matrix = 5;
    const SweepResult result = run_sweep(cfg);
    REQUIRE(result.records.size() == 100);

    std::stringstream file;
    write_records(file, result.records);
    const std::vector<BenchRecord> back = read_records(file);
    const auto rows = aggregate(back, SweepAxis::m);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        double runtime = 0, exact = 0, overlap_sum = 0, transfers = 0, count = 0;
        for (const auto& r : back) {
            if (algorithm_name(r.algorithm) != row.algorithm) continue;
            runtime += r.runtime_seconds;
            exact += r.exact_recovery;
            overlap_sum += r.support_overlap;
            transfers += static_cast<double>(r.bottom_up_transfers);
            ++count;
        }
        CHECK(count == 50);
        CHECK(row.mean_runtime == doctest::Approx(runtime / count).epsilon(1e-12));
        CHECK(row.good_solution_ratio == doctest::Approx(exact / count).epsilon(1e-12));
        CHECK(row.mean_overlap == doctest::Approx(overlap_sum / count).epsilon(1e-12));
        CHECK(row.mean_bottom_up_transfers == doctest::Approx(transfers / count).epsilon(1e-12));
        CHECK(row.mean_overlap >= row.good_solution_ratio);
        CHECK(row.good_solution_ratio >= 0.0);
        CHECK(row.good_solution_ratio <= 1.0);
    }
}

TEST_CASE("records and aggregates round trip") {
    const SweepResult result = run_sweep(tiny_sweep());
    std::stringstream file;
    write_records(file, result.records);
    const std::string text = file.str();
    CHECK(text.rfind("algorithm,n,m,k,matrix_seed,vector_seed,runtime_seconds,exact_recovery,support_overlap,"
                     "residual_norm,converged,bottom_up_transfers,iterations\n", 0) == 0);
    const auto back = read_records(file);
    CHECK(records_text(back, false) == text);

    const auto rows = aggregate(result.records, SweepAxis::m);
    std::stringstream agg;
    write_aggregates(agg, rows);
    CHECK(agg.str().rfind("algorithm,sweep_value,mean_runtime,std_runtime,good_solution_ratio,mean_overlap,"
                          "mean_bottom_up_transfers\n", 0) == 0);
    const auto rows_back = read_aggregates(agg);
    REQUIRE(rows_back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows_back[i].algorithm == rows[i].algorithm);
        CHECK(rows_back[i].mean_runtime == rows[i].mean_runtime);
        CHECK(rows_back[i].mean_overlap == rows[i].mean_overlap);
    }

    std::istringstream bad("algorithm,n\nsp,1\n");
    CHECK_THROWS_AS(read_records(bad), ParseError);
    std::istringstream short_line(text.substr(0, text.find('\n') + 1) + "sp,1,2\n");
    CHECK_THROWS_AS(read_records(short_line), ParseError);
}

TEST_CASE("merge replaces rows by algorithm name") {
    std::vector<AggregateRow> base(3);
    base[0].algorithm = "sp";
    base[1].algorithm = "l1";
    base[1].mean_runtime = 1.0;
    base[2].algorithm = "ce";
    std::vector<AggregateRow> imported(2);
    imported[0].algorithm = "l1";
    imported[0].sweep_value = 128;
    imported[0].mean_runtime = 9.0;
    imported[1].algorithm = "l1";
    imported[1].sweep_value = 256;
    const auto merged = merge_aggregates(base, imported);
    REQUIRE(merged.size() == 4);
    CHECK(merged[0].algorithm == "sp");
    CHECK(merged[1].algorithm == "ce");
    CHECK(merged[2].mean_runtime == 9.0);
}

TEST_CASE("plot data panels") {
    const auto dir = std::filesystem::temp_directory_path() / "sparsekit_plot_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::vector<AggregateRow> rows(3);
    rows[0] = {"sp", 128, 0.5, 0.25, 1.0, 1.0, 100.0};
    rows[1] = {"sp", 256, 1.5, 0.5, 0.5, 0.75, 200.0};
    rows[2] = {"ce", 128, 2.0, 0.0, 1.0, 1.0, 0.0};

    const auto linear = emit_plot_data(rows, SweepAxis::m, AxisScale::linear, dir);
    CHECK(linear.size() == 3);
    CHECK(slurp(dir / "runtime_linear.dat") ==
          "# x-axis: m\n# scale: linear\n# columns: m mean_runtime std_runtime\n"
          "# series: sp\n128 0.5 0.25\n256 1.5 0.5\n\n\n# series: ce\n128 2 0\n");
    CHECK(slurp(dir / "good_solution_ratio.dat") ==
          "# x-axis: m\n# scale: linear\n# columns: m good_solution_ratio\n"
          "# series: sp\n128 1\n256 0.5\n\n\n# series: ce\n128 1\n");
    CHECK(std::filesystem::exists(dir / "support_overlap.dat"));

    emit_plot_data(rows, SweepAxis::m, AxisScale::log, dir);
    const std::string log = slurp(dir / "runtime_log.dat");
    const std::string lin = slurp(dir / "runtime_linear.dat");
    CHECK(log.find("# scale: log\n") != std::string::npos);
    CHECK(log.substr(log.find("# columns")) == lin.substr(lin.find("# columns")));
    CHECK_THROWS_AS(emit_plot_data({}, SweepAxis::m, AxisScale::log, dir), EmptyGroup);
    std::filesystem::remove_all(dir);
}

TEST_CASE("traces line up with records") {
    SweepConfig cfg = tiny_sweep();
    cfg.algorithms = {Algorithm::sp, Algorithm::sce};
    cfg.collect_traces = true;
    const SweepResult result = run_sweep(cfg);
    REQUIRE(result.traces.size() == result.records.size());
    for (std::size_t i = 0; i < result.traces.size(); ++i) {
        CHECK(result.traces[i].record_index == i);
        if (result.records[i].algorithm == Algorithm::sp)
            CHECK(result.traces[i].pursuit.residual_norms.size() >= 1);
    }
}

TEST_CASE("summary table lists every row") {
    std::vector<AggregateRow> rows(2);
    rows[0] = {"sp", 128, 0.5, 0.25, 1.0, 1.0, 100.0};
    rows[1] = {"sce", 128, 0.5, 0.25, 0.9, 0.95, 10.0};
    const std::string s = format_summary(rows, SweepAxis::m);
    CHECK(s.find("sp") != std::string::npos);
    CHECK(s.find("sce") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') >= 3);
}
