#include "sparsekit/bench.hpp"

#include "sparsekit/errors.hpp"
#include "sparsekit/parallel.hpp"
#include "sparsekit/problem_io.hpp"
#include "sparsekit/synth.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace sparsekit {

namespace {

constexpr std::string_view kRecordHeader =
    "algorithm,n,m,k,matrix_seed,vector_seed,runtime_seconds,exact_recovery,support_overlap,"
    "residual_norm,converged,bottom_up_transfers,iterations";
constexpr std::string_view kAggregateHeader =
    "algorithm,sweep_value,mean_runtime,std_runtime,good_solution_ratio,mean_overlap,mean_bottom_up_transfers";

template <typename T>
void apply(std::optional<T>& target, const std::optional<T>& source) {
    if (source) {
        target = source;
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

template <typename T>
T parse_number(const std::string& text, const char* what) {
    std::istringstream in(text);
    T value{};
    if (!(in >> value) || !(in >> std::ws).eof()) {
        throw ParseError(std::string("bad ") + what + " field `" + text + "`");
    }
    return value;
}

bool parse_flag(const std::string& text) {
    if (text == "1") return true;
    if (text == "0") return false;
    throw ParseError("bad boolean field `" + text + "`");
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

struct Trial {
    std::size_t algorithm;
    std::size_t point;
    std::size_t matrix;
    std::size_t vector;
};

struct PreparedPoint {
    std::vector<Dictionary> dictionaries;
    std::vector<std::uint64_t> matrix_seeds;
    std::vector<std::vector<ProblemInstance>> instances;  // [matrix][vector]
};

PreparedPoint prepare_point(const SweepConfig& cfg, std::size_t point) {
    PreparedPoint prepared;
    const int m = cfg.m_at(point);
    const int k = cfg.k_at(point);
    for (int mi = 0; mi < cfg.matrices_per_point; ++mi) {
        const std::uint64_t seed = matrix_seed(cfg.base_seed, point, static_cast<std::size_t>(mi));
        Dictionary dict = gen_dictionary(cfg.n, m, seed);
        std::vector<ProblemInstance> vectors;
        std::set<IndexSet> seen;
        const std::uint64_t distinct_supports = binomial(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(k));
        for (int vi = 0; vi < cfg.vectors_per_matrix; ++vi) {
            // Redraw until the support is new for this matrix, while distinct supports remain.
            for (std::size_t attempt = 0;; ++attempt) {
                ProblemInstance instance =
                    gen_instance(dict, k, vector_seed(seed, static_cast<std::size_t>(vi), attempt),
                                 InstanceOptions{cfg.signed_values});
                if (seen.insert(instance.true_support).second || seen.size() >= distinct_supports) {
                    vectors.push_back(std::move(instance));
                    break;
                }
            }
        }
        prepared.dictionaries.push_back(std::move(dict));
        prepared.matrix_seeds.push_back(seed);
        prepared.instances.push_back(std::move(vectors));
    }
    return prepared;
}

double overlap(const IndexSet& found, const IndexSet& truth) {
    if (truth.empty()) {
        return 1.0;
    }
    const IndexSet a = sorted(found);
    IndexSet common;
    std::set_intersection(a.begin(), a.end(), truth.begin(), truth.end(), std::back_inserter(common));
    return static_cast<double>(common.size()) / static_cast<double>(truth.size());
}

std::uint64_t algorithm_tag(Algorithm a) { return 0xA160 + static_cast<std::uint64_t>(a); }

}  // namespace

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::mp: return "mp";
        case Algorithm::omp: return "omp";
        case Algorithm::sp: return "sp";
        case Algorithm::ce: return "ce";
        case Algorithm::sce: return "sce";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : {Algorithm::mp, Algorithm::omp, Algorithm::sp, Algorithm::ce, Algorithm::sce}) {
        if (algorithm_name(a) == name) {
            return a;
        }
    }
    throw InvalidArgument("unknown algorithm `" + std::string(name) + "` (expected mp, omp, sp, ce or sce)");
}

std::string_view axis_name(SweepAxis axis) { return axis == SweepAxis::m ? "m" : "k"; }

SolverOverrides SolverOverrides::merged_with(const SolverOverrides& other) const {
    SolverOverrides out = *this;
    apply(out.k, other.k);
    apply(out.population, other.population);
    apply(out.elite_ratio, other.elite_ratio);
    apply(out.alpha, other.alpha);
    apply(out.max_iters, other.max_iters);
    apply(out.inner_iters, other.inner_iters);
    apply(out.outer_iters, other.outer_iters);
    apply(out.eps, other.eps);
    apply(out.eps_relative, other.eps_relative);
    apply(out.lambda, other.lambda);
    return out;
}

PursuitConfig pursuit_config(int k, const SolverOverrides& o) {
    PursuitConfig cfg;
    cfg.k = o.k.value_or(k);
    if (o.max_iters) cfg.max_iters = *o.max_iters;
    if (o.eps) cfg.residual_tol = *o.eps;
    return cfg;
}

CEConfig ce_config(int k, const SolverOverrides& o) {
    CEConfig cfg = CEConfig::benchmark_defaults(o.k.value_or(k));
    if (o.population) cfg.population = *o.population;
    if (o.elite_ratio) cfg.elite_ratio = *o.elite_ratio;
    if (o.alpha) cfg.step_size = *o.alpha;
    if (o.max_iters) cfg.max_iters = *o.max_iters;
    if (o.eps) cfg.stop_eps = *o.eps;
    if (o.eps_relative) cfg.eps_relative = *o.eps_relative;
    if (o.lambda) cfg.lambda = *o.lambda;
    return cfg;
}

SCEConfig sce_config(int k, const SolverOverrides& o) {
    SCEConfig cfg = SCEConfig::benchmark_defaults(o.k.value_or(k));
    if (o.population) cfg.inner.population = *o.population;
    if (o.elite_ratio) cfg.inner.elite_ratio = *o.elite_ratio;
    if (o.alpha) cfg.inner.step_size = *o.alpha;
    if (o.inner_iters) cfg.inner.max_iters = *o.inner_iters;
    if (o.outer_iters) cfg.outer_iters = *o.outer_iters;
    if (o.eps) cfg.inner.stop_eps = *o.eps;
    if (o.eps_relative) cfg.inner.eps_relative = *o.eps_relative;
    if (o.lambda) cfg.inner.lambda = *o.lambda;
    return cfg;
}

SolveOutcome solve(Algorithm algorithm, const Dictionary& dict, const Vector& x, int k,
                   const SolverOverrides& overrides, const Rng& stream, bool with_trace) {
    SolveOutcome out;
    switch (algorithm) {
        case Algorithm::mp:
        case Algorithm::omp:
        case Algorithm::sp: {
            const PursuitConfig cfg = pursuit_config(k, overrides);
            PursuitTrace* trace = with_trace ? &out.pursuit_trace : nullptr;
            out.threshold = effective_tolerance(cfg, x);
            out.solution = algorithm == Algorithm::mp    ? run_mp(dict, x, cfg, trace)
                           : algorithm == Algorithm::omp ? run_omp(dict, x, cfg, trace)
                                                         : run_sp(dict, x, cfg, trace);
            break;
        }
        case Algorithm::ce: {
            const CEConfig cfg = ce_config(k, overrides);
            out.threshold = stop_threshold(cfg, x);
            out.solution = run_ce(dict, x, cfg, stream, with_trace ? &out.ce_trace : nullptr);
            break;
        }
        case Algorithm::sce: {
            const SCEConfig cfg = sce_config(k, overrides);
            CEConfig inner = cfg.inner;
            inner.expected_k = cfg.k;
            out.threshold = stop_threshold(inner, x);
            out.solution = run_sce(dict, x, cfg, stream, with_trace ? &out.sce_trace : nullptr);
            break;
        }
    }
    return out;
}

SolverOverrides SweepConfig::overrides_for(Algorithm a) const {
    const auto it = per_algorithm.find(a);
    return it == per_algorithm.end() ? common : common.merged_with(it->second);
}

void SweepConfig::validate() const {
    if (n < 1) throw InvalidArgument("n must be positive");
    if (values.empty()) throw InvalidArgument("sweep needs at least one value");
    if (algorithms.empty()) throw InvalidArgument("sweep needs at least one algorithm");
    if (matrices_per_point < 1 || vectors_per_matrix < 1) {
        throw InvalidArgument("matrices and vectors per point must be positive");
    }
    for (std::size_t point = 0; point < values.size(); ++point) {
        if (m_at(point) < 1 || k_at(point) < 0 || k_at(point) > m_at(point)) {
            throw InvalidArgument("sweep point " + std::to_string(point + 1) + " has invalid (m, k)");
        }
    }
}

std::uint64_t matrix_seed(std::uint64_t base_seed, std::size_t point, std::size_t matrix) {
    return Rng::derive(base_seed, {0x5EED'0001, point, matrix})();
}

std::uint64_t vector_seed(std::uint64_t matrix_seed, std::size_t vector, std::size_t attempt) {
    return Rng::derive(matrix_seed, {0x5EED'0002, vector, attempt})();
}

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<PreparedPoint> points;
    points.reserve(cfg.values.size());
    for (std::size_t point = 0; point < cfg.values.size(); ++point) {
        points.push_back(prepare_point(cfg, point));
    }

    std::vector<Trial> trials;
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
        for (std::size_t point = 0; point < cfg.values.size(); ++point) {
            for (std::size_t mi = 0; mi < static_cast<std::size_t>(cfg.matrices_per_point); ++mi) {
                for (std::size_t vi = 0; vi < static_cast<std::size_t>(cfg.vectors_per_matrix); ++vi) {
                    trials.push_back({a, point, mi, vi});
                }
            }
        }
    }

    SweepResult result;
    result.records.resize(trials.size());
    if (cfg.collect_traces) {
        result.traces.resize(trials.size());
    }

    auto run_trial = [&](std::size_t index) {
        const Trial& trial = trials[index];
        const Algorithm algorithm = cfg.algorithms[trial.algorithm];
        const PreparedPoint& prepared = points[trial.point];
        const Dictionary& dict = prepared.dictionaries[trial.matrix];
        const ProblemInstance& instance = prepared.instances[trial.matrix][trial.vector];

        BenchRecord& record = result.records[index];
        record.algorithm = algorithm;
        record.n = cfg.n;
        record.m = static_cast<int>(dict.cols());
        record.k = instance.k();
        record.matrix_seed = prepared.matrix_seeds[trial.matrix];
        record.vector_seed = instance.seed;

        const Rng stream = Rng::derive(instance.seed, {algorithm_tag(algorithm)});
        const auto start = std::chrono::steady_clock::now();
        try {
            SolveOutcome outcome = solve(algorithm, dict, instance.signal, instance.k(), cfg.overrides_for(algorithm),
                                         stream, cfg.collect_traces);
            const auto stop = std::chrono::steady_clock::now();
            record.runtime_seconds = std::chrono::duration<double>(stop - start).count();
            const SparseSolution& solution = outcome.solution;
            record.exact_recovery = sorted(solution.support) == instance.true_support;
            record.support_overlap = overlap(solution.support, instance.true_support);
            record.residual_norm = solution.residual_norm;
            record.converged = solution.residual_norm <= outcome.threshold;
            record.bottom_up_transfers = solution.bottom_up_transfers;
            record.iterations = solution.iterations;
            if (cfg.collect_traces) {
                TrialTrace& trace = result.traces[index];
                trace.record_index = index;
                trace.support = solution.support;
                trace.pursuit = std::move(outcome.pursuit_trace);
                trace.sce = std::move(outcome.sce_trace);
            }
        } catch (const Error&) {
            const auto stop = std::chrono::steady_clock::now();
            record.runtime_seconds = std::chrono::duration<double>(stop - start).count();
            record.residual_norm = instance.signal.norm();
            if (cfg.collect_traces) {
                result.traces[index].record_index = index;
            }
        }
    };

    if (should_parallelize()) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_limit())
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(trials.size()); ++i) {
            run_trial(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < trials.size(); ++i) {
            run_trial(i);
        }
    }
    return result;
}

std::vector<AggregateRow> aggregate(const std::vector<BenchRecord>& records, SweepAxis axis) {
    if (records.empty()) {
        throw EmptyGroup("no records to aggregate");
    }
    std::vector<std::pair<std::string, int>> keys;
    std::map<std::pair<std::string, int>, std::vector<const BenchRecord*>> groups;
    for (const auto& r : records) {
        std::pair<std::string, int> key{std::string(algorithm_name(r.algorithm)), axis == SweepAxis::m ? r.m : r.k};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) {
            keys.push_back(key);
        }
        it->second.push_back(&r);
    }

    std::vector<AggregateRow> rows;
    for (const auto& key : keys) {
        const auto& group = groups.at(key);
        const double count = static_cast<double>(group.size());
        AggregateRow row;
        row.algorithm = key.first;
        row.sweep_value = key.second;
        for (const BenchRecord* r : group) {
            row.mean_runtime += r->runtime_seconds;
            row.good_solution_ratio += r->exact_recovery ? 1.0 : 0.0;
            row.mean_overlap += r->support_overlap;
            row.mean_bottom_up_transfers += static_cast<double>(r->bottom_up_transfers);
        }
        row.mean_runtime /= count;
        row.good_solution_ratio /= count;
        row.mean_overlap /= count;
        row.mean_bottom_up_transfers /= count;
        double squares = 0.0;
        for (const BenchRecord* r : group) {
            const double d = r->runtime_seconds - row.mean_runtime;
            squares += d * d;
        }
        row.std_runtime = std::sqrt(squares / count);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_records(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << kRecordHeader << '\n';
    for (const auto& r : records) {
        out << algorithm_name(r.algorithm) << ',' << r.n << ',' << r.m << ',' << r.k << ',' << r.matrix_seed << ','
            << r.vector_seed << ',' << format_double(r.runtime_seconds) << ',' << (r.exact_recovery ? 1 : 0) << ','
            << format_double(r.support_overlap) << ',' << format_double(r.residual_norm) << ','
            << (r.converged ? 1 : 0) << ',' << r.bottom_up_transfers << ',' << r.iterations << '\n';
    }
}

std::vector<BenchRecord> read_records(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kRecordHeader) {
        throw ParseError("records file must start with the header `" + std::string(kRecordHeader) + "`");
    }
    std::vector<BenchRecord> records;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 13) {
            throw ParseError("records line has " + std::to_string(f.size()) + " fields, expected 13");
        }
        BenchRecord r;
        try {
            r.algorithm = parse_algorithm(f[0]);
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what());
        }
        r.n = parse_number<int>(f[1], "n");
        r.m = parse_number<int>(f[2], "m");
        r.k = parse_number<int>(f[3], "k");
        r.matrix_seed = parse_number<std::uint64_t>(f[4], "matrix_seed");
        r.vector_seed = parse_number<std::uint64_t>(f[5], "vector_seed");
        r.runtime_seconds = parse_number<double>(f[6], "runtime_seconds");
        r.exact_recovery = parse_flag(f[7]);
        r.support_overlap = parse_number<double>(f[8], "support_overlap");
        r.residual_norm = parse_number<double>(f[9], "residual_norm");
        r.converged = parse_flag(f[10]);
        r.bottom_up_transfers = parse_number<std::int64_t>(f[11], "bottom_up_transfers");
        r.iterations = parse_number<long>(f[12], "iterations");
        records.push_back(r);
    }
    return records;
}

void write_aggregates(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << kAggregateHeader << '\n';
    for (const auto& row : rows) {
        out << row.algorithm << ',' << row.sweep_value << ',' << format_double(row.mean_runtime) << ','
            << format_double(row.std_runtime) << ',' << format_double(row.good_solution_ratio) << ','
            << format_double(row.mean_overlap) << ',' << format_double(row.mean_bottom_up_transfers) << '\n';
    }
}

std::vector<AggregateRow> read_aggregates(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kAggregateHeader) {
        throw ParseError("aggregates file must start with the header `" + std::string(kAggregateHeader) + "`");
    }
    std::vector<AggregateRow> rows;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 7 || f[0].empty()) {
            throw ParseError("aggregates line must have 7 fields and an algorithm name");
        }
        AggregateRow row;
        row.algorithm = f[0];
        row.sweep_value = parse_number<int>(f[1], "sweep_value");
        row.mean_runtime = parse_number<double>(f[2], "mean_runtime");
        row.std_runtime = parse_number<double>(f[3], "std_runtime");
        row.good_solution_ratio = parse_number<double>(f[4], "good_solution_ratio");
        row.mean_overlap = parse_number<double>(f[5], "mean_overlap");
        row.mean_bottom_up_transfers = parse_number<double>(f[6], "mean_bottom_up_transfers");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<AggregateRow> merge_aggregates(std::vector<AggregateRow> base, const std::vector<AggregateRow>& imported) {
    std::set<std::string> replaced;
    for (const auto& row : imported) {
        replaced.insert(row.algorithm);
    }
    std::erase_if(base, [&](const AggregateRow& row) { return replaced.contains(row.algorithm); });
    base.insert(base.end(), imported.begin(), imported.end());
    return base;
}

std::vector<std::filesystem::path> emit_plot_data(const std::vector<AggregateRow>& rows, SweepAxis axis,
                                                  AxisScale scale, const std::filesystem::path& dir) {
    if (rows.empty()) {
        throw EmptyGroup("no aggregates to plot");
    }
    const std::string x = std::string(axis_name(axis));
    const char* scale_name = scale == AxisScale::log ? "log" : "linear";

    std::vector<std::string> series;
    for (const auto& row : rows) {
        if (std::find(series.begin(), series.end(), row.algorithm) == series.end()) {
            series.push_back(row.algorithm);
        }
    }

    struct Panel {
        std::string file;
        std::string columns;
        std::function<void(std::ostream&, const AggregateRow&)> emit;
    };
    const std::vector<Panel> panels{
        {std::string("runtime_") + scale_name + ".dat", x + " mean_runtime std_runtime",
         [](std::ostream& o, const AggregateRow& r) {
             o << format_double(r.mean_runtime) << ' ' << format_double(r.std_runtime);
         }},
        {"good_solution_ratio.dat", x + " good_solution_ratio",
         [](std::ostream& o, const AggregateRow& r) { o << format_double(r.good_solution_ratio); }},
        {"support_overlap.dat", x + " mean_overlap",
         [](std::ostream& o, const AggregateRow& r) { o << format_double(r.mean_overlap); }},
    };

    std::vector<std::filesystem::path> written;
    for (const auto& panel : panels) {
        const auto path = dir / panel.file;
        std::ofstream out(path);
        if (!out) {
            throw IoError("cannot open " + path.string() + " for writing");
        }
        out << "# x-axis: " << x << '\n' << "# scale: " << scale_name << '\n' << "# columns: " << panel.columns << '\n';
        for (std::size_t s = 0; s < series.size(); ++s) {
            out << (s ? "\n\n" : "") << "# series: " << series[s] << '\n';
            for (const auto& row : rows) {
                if (row.algorithm == series[s]) {
                    out << row.sweep_value << ' ';
                    panel.emit(out, row);
                    out << '\n';
                }
            }
        }
        if (!out) {
            throw IoError("failed writing " + path.string());
        }
        written.push_back(path);
    }
    return written;
}

std::string format_summary(const std::vector<AggregateRow>& rows, SweepAxis axis) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %8s %14s %14s %10s %10s %16s\n", "algorithm",
                  std::string(axis_name(axis)).c_str(), "mean_runtime", "std_runtime", "good_ratio", "overlap",
                  "transfers");
    out << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-10s %8d %14.6g %14.6g %10.3f %10.3f %16.6g\n", r.algorithm.c_str(),
                      r.sweep_value, r.mean_runtime, r.std_runtime, r.good_solution_ratio, r.mean_overlap,
                      r.mean_bottom_up_transfers);
        out << line;
    }
    return out.str();
}

}  // namespace sparsekit
