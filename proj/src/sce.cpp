#include "sparsekit/sce.hpp"

#include "sparsekit/errors.hpp"

#include <cmath>

namespace sparsekit {

SCEConfig SCEConfig::benchmark_defaults(int k) {
    SCEConfig cfg;
    cfg.k = k;
    cfg.inner.population = 100;
    cfg.inner.elite_ratio = 0.05;
    cfg.inner.step_size = 0.9;
    cfg.inner.max_iters = 6;
    cfg.inner.expected_k = k;
    return cfg;
}

void SCEConfig::validate(Eigen::Index n) const {
    inner.validate();
    if (k < 1) {
        throw InvalidArgument("k must be positive");
    }
    if (k > n) {
        throw KTooLarge(k, n);
    }
    if (outer_iters < 1) {
        throw InvalidArgument("outer iterations must be at least 1");
    }
}

Vector auxiliary_weights(const Vector& e, int k) {
    if (k < 1) {
        throw InvalidArgument("k must be positive");
    }
    const IndexSet order = max_ind(e, static_cast<int>(e.size()));
    Vector q(e.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        q[order[rank]] = std::exp(-static_cast<double>(rank + 1) / static_cast<double>(k));
    }
    return q;
}

Vector unclamped_correction(const Vector& p, const Vector& e, double residual_norm, int k) {
    if (p.size() != e.size()) {
        throw InvalidArgument("distribution and projection lengths differ");
    }
    const Vector mixed = p + residual_norm * auxiliary_weights(e, k);
    const double mass = mixed.lpNorm<1>();
    if (!(mass > 0.0)) {
        return p;
    }
    return (static_cast<double>(k) / mass) * mixed;
}

Vector correct_distribution(const Vector& p, const Vector& e, double residual_norm, int k) {
    return unclamped_correction(p, e, residual_norm, k).cwiseMax(0.0).cwiseMin(1.0);
}

Vector sp_correction(const Vector& p, const Vector& r, const Dictionary& dict, int k) {
    return correct_distribution(p, dict.project(r), r.norm(), k);
}

SparseSolution run_sce(const Dictionary& dict, const Vector& x, const SCEConfig& cfg, const Rng& stream,
                       SceTrace* trace) {
    cfg.validate(dict.rows());
    if (x.size() != dict.rows()) {
        throw InvalidArgument("signal length does not match dictionary rows");
    }
    CEConfig inner = cfg.inner;
    inner.expected_k = cfg.k;
    const double eps = stop_threshold(inner, x);

    Vector p = initial_distribution(inner, dict.cols());
    Mask best(static_cast<std::size_t>(dict.cols()), 0);
    double previous = x.norm();
    long rounds = 0;
    std::int64_t transfers = 0;

    for (int t = 1; t <= cfg.outer_iters && previous > eps; ++t) {
        const CeLoopResult round =
            ce_loop(dict, x, inner, p, inner.max_iters, stream.fork(static_cast<std::uint64_t>(t)));
        rounds = t;
        if (trace) {
            trace->inner_batches += round.iterations;
        }
        if (!(round.best.residual < previous)) {
            if (trace) {
                trace->rejected_residual = round.best.residual;
            }
            break;
        }
        best = round.best.y;
        previous = round.best.residual;
        if (trace) {
            trace->residual_norms.push_back(previous);
        }
        if (previous <= eps || t == cfg.outer_iters) {
            break;
        }
        const Vector r = residual(dict, mask_support(best), x).residual;
        p = sp_correction(p, r, dict, cfg.k);
        transfers += dict.transfer_cost();
        if (trace) {
            ++trace->corrections;
        }
    }

    SparseSolution out = solution_from_mask(dict, x, best, inner.prune_tolerance);
    out.iterations = rounds;
    out.bottom_up_transfers = transfers;
    return out;
}

}  // namespace sparsekit
