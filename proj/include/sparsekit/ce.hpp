#pragma once

#include "sparsekit/linalg.hpp"
#include "sparsekit/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sparsekit {

/// Binary inclusion vector over dictionary columns (0 or 1 per column).
using Mask = std::vector<std::uint8_t>;

struct MaskSample {
    Mask y;
    double cost = 0.0;      // residual + lambda * |supp(y)|, +inf when degenerate
    double residual = 0.0;  // least-squares residual norm on supp(y), +inf when degenerate
};

/// Batch cross-entropy over independent Bernoulli distributions.
struct CEConfig {
    int population = 500;     // samples per batch (I)
    double elite_ratio = 0.05;  // rho
    double step_size = 0.1;     // alpha
    int max_iters = 100;        // batches (T)
    /// Stop when the best residual is at most this. Unset means 0.1 / expected_k.
    std::optional<double> stop_eps;
    /// Interpret stop_eps as a fraction of ||x||_2.
    bool eps_relative = false;
    double lambda = 0.0;   // sparsity penalty weight
    int expected_k = 1;    // soft sparsity; sets the uniform default p_j = k / M
    std::optional<Vector> initial_p;
    /// Coefficients with |c| <= prune_tolerance * ||x||_2 are dropped from the
    /// returned support. Negative disables pruning.
    double prune_tolerance = 1e-9;

    /// Batch CE parameters used for the synthetic benchmark.
    static CEConfig benchmark_defaults(int k);

    void validate() const;
};

struct CeTrace {
    std::vector<double> best_costs;  // running minimum after each batch
    std::vector<double> gammas;      // elite threshold of each batch
    std::vector<std::size_t> elite_sizes;
};

/// supp(y) in ascending order.
IndexSet mask_support(const Mask& y);
Mask support_mask(const IndexSet& support, Eigen::Index m);

/// Residual norm plus lambda * |supp(y)|. Masks with more than N ones or a
/// rank-deficient column set cost +infinity.
double sparse_objective(const Dictionary& dict, const Vector& x, const Mask& y, double lambda);
MaskSample evaluate_mask(const Dictionary& dict, const Vector& x, Mask y, double lambda);

/// `count` independent draws from BER^M(p). Sample i uses stream.fork(i), so the
/// result does not depend on thread count.
std::vector<Mask> draw_samples(const Vector& p, int count, const Rng& stream);
std::vector<Mask> draw_samples_serial(const Vector& p, int count, const Rng& stream);

/// Draws and scores one batch in place. Parallel over samples when allowed.
std::vector<MaskSample> sample_batch(const Dictionary& dict, const Vector& x, const Vector& p, int count,
                                     const Rng& stream, double lambda);
std::vector<MaskSample> sample_batch_serial(const Dictionary& dict, const Vector& x, const Vector& p,
                                            int count, const Rng& stream, double lambda);

/// ceil(rho * I), at least 1 and at most I.
std::size_t elite_rank(double elite_ratio, std::size_t population);

struct EliteUpdate {
    Vector p;            // alpha * p' + (1 - alpha) * p
    Vector empirical;    // p': frequency of ones in the elite set
    double gamma = 0.0;  // cost of the ceil(rho * I)-th best sample
    std::size_t elite_size = 0;
};

/// Refits the Bernoulli parameters to all samples with cost <= gamma. Cost ties
/// can make the elite set larger than ceil(rho * I).
EliteUpdate elite_update(const std::vector<MaskSample>& samples, const Vector& p, const CEConfig& cfg);

/// Outcome of a CE loop that continues from a caller-owned distribution.
struct CeLoopResult {
    MaskSample best;       // lowest-cost sample seen (first one on ties)
    int iterations = 0;    // batches drawn
    bool reached_eps = false;
};

/// Runs up to `iterations` batches starting from (and updating) `p`. Batch t
/// draws from stream.fork(t).
CeLoopResult ce_loop(const Dictionary& dict, const Vector& x, const CEConfig& cfg, Vector& p, int iterations,
                     const Rng& stream, CeTrace* trace = nullptr);

/// Stop threshold in residual units for signal x.
double stop_threshold(const CEConfig& cfg, const Vector& x);

/// Initial distribution: cfg.initial_p or k / M in every component.
Vector initial_distribution(const CEConfig& cfg, Eigen::Index m);

/// Full batch CE; the returned solution is the least-squares fit on the best mask.
SparseSolution run_ce(const Dictionary& dict, const Vector& x, const CEConfig& cfg, const Rng& stream,
                      CeTrace* trace = nullptr);

/// Least-squares solution for a mask with negligible coefficients pruned.
SparseSolution solution_from_mask(const Dictionary& dict, const Vector& x, const Mask& y,
                                  double prune_tolerance);

}  // namespace sparsekit
