// sparsekit command-line front end.
//
//   sparsekit gen    --n N --m M --k K --seed S [--out FILE] [--signed]
//   sparsekit solve  PROBLEM --alg {mp,omp,sp,ce,sce} [solver flags] [--format text|records]
//   sparsekit bench  CONFIG --out DIR [solver flags]
//   sparsekit oracle PROBLEM [--k K] [--budget B]
//
// Exit codes: 0 ok, 2 invalid flags or config, 3 IO failure, 4 problem file
// parse failure, 5 solver error, 6 oracle budget exceeded.

#include "sparsekit/bench.hpp"
#include "sparsekit/config.hpp"
#include "sparsekit/errors.hpp"
#include "sparsekit/problem_io.hpp"
#include "sparsekit/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace sparsekit;

namespace {

enum Exit : int {
    kOk = 0,
    kBadFlags = 2,
    kIoFailure = 3,
    kParseFailure = 4,
    kSolverFailure = 5,
    kBudgetExceeded = 6,
};

/// Thrown for flag combinations CLI11 cannot validate on its own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverFlags {
    std::optional<int> k;
    std::optional<double> eps;
    bool eps_relative = false;
    std::optional<double> lambda;
    std::optional<int> population;
    std::optional<double> elite_ratio;
    std::optional<double> alpha;
    std::optional<int> max_iters;
    std::optional<int> inner_iters;
    std::optional<int> outer_iters;

    void attach(CLI::App& app) {
        app.add_option("--k", k, "Sparsity handed to the solver")->check(CLI::NonNegativeNumber);
        app.add_option("--eps", eps, "Stop residual (CE/SCE) or residual tolerance (pursuits)");
        app.add_flag("--eps-relative", eps_relative, "Treat --eps as a fraction of ||x||");
        app.add_option("--lambda", lambda, "Sparsity penalty weight");
        app.add_option("--population", population, "Samples per CE batch")->check(CLI::PositiveNumber);
        app.add_option("--elite-ratio", elite_ratio, "Elite fraction rho");
        app.add_option("--alpha", alpha, "Bernoulli update step size");
        app.add_option("--max-iters", max_iters, "Pursuit iterations or CE batches")->check(CLI::PositiveNumber);
        app.add_option("--inner-iters", inner_iters, "SCE batches per round")->check(CLI::PositiveNumber);
        app.add_option("--outer-iters", outer_iters, "SCE rounds")->check(CLI::PositiveNumber);
    }

    SolverOverrides overrides() const {
        SolverOverrides o;
        o.k = k;
        o.eps = eps;
        if (eps_relative) o.eps_relative = true;
        o.lambda = lambda;
        o.population = population;
        o.elite_ratio = elite_ratio;
        o.alpha = alpha;
        o.max_iters = max_iters;
        o.inner_iters = inner_iters;
        o.outer_iters = outer_iters;
        return o;
    }
};

fs::path sidecar_path(const std::optional<std::string>& out, const char* command) {
    return out ? fs::path(*out + ".cfg") : fs::path(std::string("sparsekit_") + command + ".cfg");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream file(path);
    if (!file || !(file << text) || !file.flush()) {
        throw IoError("cannot write " + path.string());
    }
}

std::string join_one_based(const IndexSet& support) {
    std::ostringstream out;
    for (std::size_t i = 0; i < support.size(); ++i) {
        out << (i ? " " : "") << support[i] + 1;
    }
    return out.str();
}

/// Values reordered to follow the ascending support.
std::string join_values(const SparseSolution& s) {
    std::vector<std::size_t> order(s.support.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.support[a] < s.support[b]; });
    std::ostringstream out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        out << (i ? " " : "") << format_double(s.values[static_cast<Eigen::Index>(order[i])]);
    }
    return out.str();
}

void emit_output(const std::optional<std::string>& out_path, const std::string& text) {
    if (out_path) {
        write_text(*out_path, text);
    } else {
        std::cout << text;
    }
}

int cmd_gen(int n, int m, int k, std::uint64_t seed, bool signed_values, const std::optional<std::string>& out) {
    if (k > m) {
        throw UsageError("--k must not exceed --m");
    }
    const Dictionary dict = gen_dictionary(n, m, seed);
    const ProblemInstance problem = gen_instance(dict, k, seed, InstanceOptions{signed_values});
    std::ostringstream text;
    write_problem(text, problem);
    emit_output(out, text.str());

    std::ostringstream cfg;
    cfg << "command = gen\nn = " << n << "\nm = " << m << "\nk = " << k << "\nseed = " << seed
        << "\nsigned = " << (signed_values ? 1 : 0) << "\nrng = " << Rng::kVersion << '\n';
    write_text(sidecar_path(out, "gen"), cfg.str());
    return kOk;
}

int cmd_solve(const std::string& problem_path, const std::string& alg, const SolverFlags& flags,
              std::optional<std::uint64_t> seed, const std::string& format, const std::optional<std::string>& out) {
    const Algorithm algorithm = parse_algorithm(alg);
    const ProblemInstance problem = load_problem(problem_path);
    const SolverOverrides overrides = flags.overrides();
    const int k = overrides.k.value_or(problem.k());
    const std::uint64_t stream_seed = seed.value_or(problem.seed);

    const auto start = std::chrono::steady_clock::now();
    const SolveOutcome outcome =
        solve(algorithm, problem.dictionary, problem.signal, k, overrides, Rng::derive(stream_seed, {0x501E}));
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const SparseSolution& s = outcome.solution;

    std::ostringstream text;
    if (format == "records") {
        BenchRecord r;
        r.algorithm = algorithm;
        r.n = static_cast<int>(problem.dictionary.rows());
        r.m = static_cast<int>(problem.dictionary.cols());
        r.k = problem.k();
        r.matrix_seed = problem.seed;
        r.vector_seed = problem.seed;
        r.runtime_seconds = runtime;
        r.exact_recovery = sorted(s.support) == problem.true_support;
        IndexSet common;
        const IndexSet found = sorted(s.support);
        std::set_intersection(found.begin(), found.end(), problem.true_support.begin(), problem.true_support.end(),
                              std::back_inserter(common));
        r.support_overlap = problem.true_support.empty()
                                ? 1.0
                                : static_cast<double>(common.size()) / static_cast<double>(problem.true_support.size());
        r.residual_norm = s.residual_norm;
        r.converged = s.residual_norm <= outcome.threshold;
        r.bottom_up_transfers = s.bottom_up_transfers;
        r.iterations = s.iterations;
        write_records(text, {r});
    } else {
        text << "algorithm: " << alg << '\n'
             << "support: " << join_one_based(sorted(s.support)) << '\n'
             << "values: " << join_values(s) << '\n'
             << "residual_norm: " << format_double(s.residual_norm) << '\n'
             << "iterations: " << s.iterations << '\n'
             << "bottom_up_transfers: " << s.bottom_up_transfers << '\n'
             << "runtime_seconds: " << format_double(runtime) << '\n';
    }
    emit_output(out, text.str());

    std::ostringstream cfg;
    cfg << "command = solve\nproblem = " << problem_path << "\nalgorithm = " << alg << "\nseed = " << stream_seed
        << "\nformat = " << format << '\n';
    SweepConfig resolved;
    resolved.n = static_cast<int>(problem.dictionary.rows());
    resolved.values = {static_cast<int>(problem.dictionary.cols())};
    resolved.fixed = k;
    resolved.algorithms = {algorithm};
    resolved.common = overrides;
    const std::string full = describe(resolved);
    // Only the per-algorithm block applies to a single solve.
    const std::string prefix = alg + ".";
    std::istringstream lines(full);
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind(prefix, 0) == 0) {
            cfg << line << '\n';
        }
    }
    cfg << "k = " << k << '\n';
    write_text(sidecar_path(out, "solve"), cfg.str());
    return kOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir, const SolverFlags& flags,
              std::optional<std::uint64_t> seed) {
    const KeyValues kv = load_key_values(config_path);
    SweepConfig cfg = sweep_config_from(kv);
    cfg.common = cfg.common.merged_with(flags.overrides());
    for (auto& [algorithm, o] : cfg.per_algorithm) {
        // Flags win over per-algorithm config keys too.
        o = o.merged_with(flags.overrides());
    }
    if (seed) cfg.base_seed = *seed;

    AxisScale scale = AxisScale::linear;
    if (const auto it = kv.find("scale"); it != kv.end()) {
        if (it->second == "log") scale = AxisScale::log;
        else if (it->second != "linear") throw ParseError("scale must be linear or log");
    }

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_text(dir / "resolved.cfg", describe(cfg) + "scale = " + (scale == AxisScale::log ? "log" : "linear") +
                                         "\nrng = " + std::string(Rng::kVersion) + '\n');

    const SweepResult result = run_sweep(cfg);
    std::ostringstream records;
    write_records(records, result.records);
    write_text(dir / "records.csv", records.str());

    std::vector<AggregateRow> rows = aggregate(result.records, cfg.axis);
    if (const auto it = kv.find("import"); it != kv.end()) {
        std::ifstream imported(it->second);
        if (!imported) {
            throw IoError("cannot open " + it->second);
        }
        rows = merge_aggregates(std::move(rows), read_aggregates(imported));
    }
    std::ostringstream aggregates;
    write_aggregates(aggregates, rows);
    write_text(dir / "aggregates.csv", aggregates.str());
    emit_plot_data(rows, cfg.axis, scale, dir);

    std::cout << format_summary(rows, cfg.axis);
    return kOk;
}

int cmd_oracle(const std::string& problem_path, std::optional<int> k, std::uint64_t budget,
               const std::optional<std::string>& out) {
    const ProblemInstance problem = load_problem(problem_path);
    const int target = k.value_or(problem.k());
    const SparseSolution s = exhaustive_oracle(problem.dictionary, problem.signal, target, budget);

    std::ostringstream text;
    text << "algorithm: oracle\n"
         << "support: " << join_one_based(sorted(s.support)) << '\n'
         << "values: " << join_values(s) << '\n'
         << "residual_norm: " << format_double(s.residual_norm) << '\n'
         << "enumerated: " << binomial(static_cast<std::uint64_t>(problem.dictionary.cols()),
                                       static_cast<std::uint64_t>(target))
         << '\n';
    emit_output(out, text.str());

    std::ostringstream cfg;
    cfg << "command = oracle\nproblem = " << problem_path << "\nk = " << target << "\nbudget = " << budget << '\n';
    write_text(sidecar_path(out, "oracle"), cfg.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse recovery toolkit: pursuits, cross-entropy and subspace cross-entropy"};
    app.require_subcommand(1);

    int n = 0, m = 0, k = 0;
    std::uint64_t gen_seed = 0;
    bool signed_values = false;
    std::optional<std::string> out;
    auto* gen = app.add_subcommand("gen", "Generate a planted problem file");
    gen->add_option("--n", n, "Signal dimension")->required()->check(CLI::PositiveNumber);
    gen->add_option("--m", m, "Dictionary size")->required()->check(CLI::PositiveNumber);
    gen->add_option("--k", k, "Non-zero coefficients")->required()->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", gen_seed, "Generator seed")->required();
    gen->add_option("--out", out, "Output file (default stdout)");
    gen->add_flag("--signed", signed_values, "Use random +-1 coefficients");

    std::string problem_path;
    std::string alg;
    std::string format = "text";
    std::optional<std::uint64_t> seed;
    SolverFlags solver_flags;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file with one algorithm");
    solve_cmd->add_option("problem", problem_path, "Problem file")->required();
    solve_cmd->add_option("--alg", alg, "mp, omp, sp, ce or sce")->required()->check(
        CLI::IsMember({"mp", "omp", "sp", "ce", "sce"}));
    solve_cmd->add_option("--seed", seed, "Random stream seed for ce/sce (default: problem seed)");
    solve_cmd->add_option("--format", format, "text or records")->check(CLI::IsMember({"text", "records"}));
    solve_cmd->add_option("--out", out, "Report file (default stdout)");
    solver_flags.attach(*solve_cmd);

    std::string config_path;
    std::string out_dir;
    SolverFlags bench_flags;
    std::optional<std::uint64_t> bench_seed;
    auto* bench = app.add_subcommand("bench", "Run a benchmark sweep from a key=value config");
    bench->add_option("config", config_path, "Sweep config file")->required();
    bench->add_option("--out", out_dir, "Output directory")->required();
    bench->add_option("--seed", bench_seed, "Override the config's base seed");
    bench_flags.attach(*bench);

    std::optional<int> oracle_k;
    std::uint64_t budget = kDefaultOracleBudget;
    auto* oracle = app.add_subcommand("oracle", "Exhaustive minimum-residual support search");
    oracle->add_option("problem", problem_path, "Problem file")->required();
    oracle->add_option("--k", oracle_k, "Support size (default: problem K)")->check(CLI::NonNegativeNumber);
    oracle->add_option("--budget", budget, "Maximum subsets to enumerate")->check(CLI::PositiveNumber);
    oracle->add_option("--out", out, "Report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadFlags;
    }

    try {
        if (*gen) return cmd_gen(n, m, k, gen_seed, signed_values, out);
        if (*solve_cmd) return cmd_solve(problem_path, alg, solver_flags, seed, format, out);
        if (*bench) {
            try {
                return cmd_bench(config_path, out_dir, bench_flags, bench_seed);
            } catch (const ParseError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kBadFlags;
            }
        }
        if (*oracle) return cmd_oracle(problem_path, oracle_k, budget, out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadFlags;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadFlags;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParseFailure;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << " (required " << e.required() << ")\n";
        return kBudgetExceeded;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolverFailure;
    }
    return kBadFlags;
}
