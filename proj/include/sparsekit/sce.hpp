#pragma once

#include "sparsekit/ce.hpp"
#include "sparsekit/linalg.hpp"
#include "sparsekit/rng.hpp"

#include <optional>
#include <vector>

namespace sparsekit {

/// Subspace cross-entropy: short CE runs separated by a residual-driven
/// reweighting of the Bernoulli parameters.
struct SCEConfig {
    int k = 1;             // soft target sparsity
    int outer_iters = 20;  // correction rounds
    CEConfig inner;        // inner.max_iters is the number of batches per round

    static SCEConfig benchmark_defaults(int k);
    void validate(Eigen::Index n) const;
};

struct SceTrace {
    std::vector<double> residual_norms;  // accepted rounds, strictly decreasing
    std::optional<double> rejected_residual;
    int corrections = 0;
    int inner_batches = 0;
};

/// exp(-rank / k) placed at each index, where rank 1 is the largest |e|
/// (ties to the lower index).
Vector auxiliary_weights(const Vector& e, int k);

/// p + residual_norm * auxiliary_weights(e, k), rescaled to sum to k. This is
/// the vector before clipping to [0, 1]; exposed for checking the normalization.
Vector unclamped_correction(const Vector& p, const Vector& e, double residual_norm, int k);

/// unclamped_correction clipped componentwise to [0, 1]. Mass above 1 is dropped.
Vector correct_distribution(const Vector& p, const Vector& e, double residual_norm, int k);

/// Full correction step from a residual: one bottom-up projection e = D^T r.
Vector sp_correction(const Vector& p, const Vector& r, const Dictionary& dict, int k);

/// Runs SCE. The returned support may hold more or fewer than k indices.
SparseSolution run_sce(const Dictionary& dict, const Vector& x, const SCEConfig& cfg, const Rng& stream,
                       SceTrace* trace = nullptr);

}  // namespace sparsekit
