#pragma once

#include "sparsekit/linalg.hpp"

#include <optional>
#include <vector>

namespace sparsekit {

struct PursuitConfig {
    int k = 1;           // target sparsity
    int max_iters = 100;
    /// Stop once ||r||_2 <= residual_tol. Unset means 1e-9 * ||x||_2.
    std::optional<double> residual_tol;
};

inline constexpr double kDefaultRelativeTolerance = 1e-9;

/// Tolerance a pursuit actually uses for signal x.
double effective_tolerance(const PursuitConfig& cfg, const Vector& x);

/// Per-iteration record filled in when a caller passes a trace pointer.
struct PursuitTrace {
    /// Residual norm after initialization and after every accepted iteration.
    std::vector<double> residual_norms;
    /// Support after initialization and after every accepted iteration.
    std::vector<IndexSet> supports;
    /// Matching pursuit only: the projection d_b^T r removed at each step.
    std::vector<double> step_projections;
    /// Subspace pursuit only: the candidate that failed the improvement check.
    std::optional<double> rejected_residual;
    std::optional<IndexSet> rejected_support;
};

/// Matching pursuit. Each step deflates r by its projection on the most
/// correlated column; repeated picks accumulate into one coefficient.
/// Stops at k distinct indices, ||r|| <= tol, or max_iters steps.
SparseSolution run_mp(const Dictionary& dict, const Vector& x, const PursuitConfig& cfg,
                      PursuitTrace* trace = nullptr);

/// Orthogonal matching pursuit: distinct picks, coefficients re-solved every step.
/// Throws KTooLarge when k > N.
SparseSolution run_omp(const Dictionary& dict, const Vector& x, const PursuitConfig& cfg,
                       PursuitTrace* trace = nullptr);

/// Subspace pursuit. Expands the current k-set by the k largest residual
/// correlations, re-solves on the union, prunes back to the k largest
/// coefficients, and halts (keeping the previous set) as soon as the residual
/// fails to decrease. The zero-residual exit is tested inside the main loop, so
/// at least one refinement runs when k > 0. Throws KTooLarge when 2k > N.
SparseSolution run_sp(const Dictionary& dict, const Vector& x, const PursuitConfig& cfg,
                      PursuitTrace* trace = nullptr);

}  // namespace sparsekit
