#pragma once

#include "sparsekit/ce.hpp"
#include "sparsekit/pursuit.hpp"
#include "sparsekit/sce.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparsekit {

enum class Algorithm { mp, omp, sp, ce, sce };

std::string_view algorithm_name(Algorithm a);
/// Throws InvalidArgument for unknown names.
Algorithm parse_algorithm(std::string_view name);

/// Parameter overrides shared by the CLI and sweep configs. Unset fields keep
/// the algorithm's benchmark defaults.
struct SolverOverrides {
    std::optional<int> k;
    std::optional<int> population;
    std::optional<double> elite_ratio;
    std::optional<double> alpha;
    std::optional<int> max_iters;    // pursuit iterations or CE batches
    std::optional<int> inner_iters;  // SCE batches per round
    std::optional<int> outer_iters;  // SCE rounds
    std::optional<double> eps;
    std::optional<bool> eps_relative;
    std::optional<double> lambda;

    /// Fields set in `other` win.
    SolverOverrides merged_with(const SolverOverrides& other) const;
};

PursuitConfig pursuit_config(int k, const SolverOverrides& o);
CEConfig ce_config(int k, const SolverOverrides& o);
SCEConfig sce_config(int k, const SolverOverrides& o);

/// Solver run together with its convergence threshold.
struct SolveOutcome {
    SparseSolution solution;
    double threshold = 0.0;  // residual level counted as converged
    PursuitTrace pursuit_trace;
    SceTrace sce_trace;
    CeTrace ce_trace;
};

/// Dispatches to the selected solver. `k` is the sparsity handed to the solver
/// (exact K for pursuits, soft K for CE and SCE).
SolveOutcome solve(Algorithm algorithm, const Dictionary& dict, const Vector& x, int k,
                   const SolverOverrides& overrides, const Rng& stream, bool with_trace = false);

enum class SweepAxis { m, k };

struct SweepConfig {
    int n = 64;
    SweepAxis axis = SweepAxis::m;
    std::vector<int> values{128, 256, 512, 1024};
    int fixed = 8;  // K for an m sweep, M for a k sweep
    std::vector<Algorithm> algorithms{Algorithm::sp, Algorithm::ce, Algorithm::sce};
    int matrices_per_point = 10;
    int vectors_per_matrix = 10;
    std::uint64_t base_seed = 1;
    bool signed_values = false;
    SolverOverrides common;
    std::map<Algorithm, SolverOverrides> per_algorithm;
    bool collect_traces = false;

    int m_at(std::size_t point) const { return axis == SweepAxis::m ? values.at(point) : fixed; }
    int k_at(std::size_t point) const { return axis == SweepAxis::k ? values.at(point) : fixed; }
    SolverOverrides overrides_for(Algorithm a) const;
    void validate() const;
};

struct BenchRecord {
    Algorithm algorithm = Algorithm::sp;
    int n = 0;
    int m = 0;
    int k = 0;
    std::uint64_t matrix_seed = 0;
    std::uint64_t vector_seed = 0;
    double runtime_seconds = 0.0;
    bool exact_recovery = false;
    double support_overlap = 0.0;
    double residual_norm = 0.0;
    bool converged = false;
    std::int64_t bottom_up_transfers = 0;
    long iterations = 0;
};

/// Instrumentation captured for one trial when SweepConfig::collect_traces is set.
struct TrialTrace {
    std::size_t record_index = 0;
    IndexSet support;  // as returned by the solver
    PursuitTrace pursuit;
    SceTrace sce;
};

struct SweepResult {
    std::vector<BenchRecord> records;  // canonical order: algorithm, point, matrix, vector
    std::vector<TrialTrace> traces;    // empty unless collect_traces
};

/// Runs every (algorithm, point, matrix, vector) trial. Trials run on OpenMP
/// threads when allowed; output order and every non-runtime field are
/// independent of the schedule. A solver error yields a non-converged record.
SweepResult run_sweep(const SweepConfig& cfg);

/// Seeds used by run_sweep, exposed for regenerating individual trials.
std::uint64_t matrix_seed(std::uint64_t base_seed, std::size_t point, std::size_t matrix);
std::uint64_t vector_seed(std::uint64_t matrix_seed, std::size_t vector, std::size_t attempt);

struct AggregateRow {
    std::string algorithm;
    int sweep_value = 0;
    double mean_runtime = 0.0;
    double std_runtime = 0.0;  // population standard deviation
    double good_solution_ratio = 0.0;
    double mean_overlap = 0.0;
    double mean_bottom_up_transfers = 0.0;
};

/// One row per (algorithm, sweep value) in first-appearance order.
/// Throws EmptyGroup when there are no records.
std::vector<AggregateRow> aggregate(const std::vector<BenchRecord>& records, SweepAxis axis);

void write_records(std::ostream& out, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_records(std::istream& in);
void write_aggregates(std::ostream& out, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregates(std::istream& in);

/// Rows of `imported` replace every row of `base` with the same algorithm name.
std::vector<AggregateRow> merge_aggregates(std::vector<AggregateRow> base, const std::vector<AggregateRow>& imported);

enum class AxisScale { linear, log };

/// Writes runtime, good-solution-ratio and support-overlap panels into `dir`,
/// one block per algorithm. Returns the written paths.
std::vector<std::filesystem::path> emit_plot_data(const std::vector<AggregateRow>& rows, SweepAxis axis,
                                                  AxisScale scale, const std::filesystem::path& dir);

/// Fixed-width table for terminal output.
std::string format_summary(const std::vector<AggregateRow>& rows, SweepAxis axis);

std::string_view axis_name(SweepAxis axis);

}  // namespace sparsekit
