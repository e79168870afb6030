#include "sparsekit/pursuit.hpp"

#include "sparsekit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sparsekit {

namespace {

void validate(const Dictionary& dict, const Vector& x, const PursuitConfig& cfg) {
    if (x.size() != dict.rows()) {
        throw InvalidArgument("signal length does not match dictionary rows");
    }
    if (cfg.k < 0) {
        throw InvalidArgument("k must be non-negative");
    }
    if (cfg.k > dict.cols()) {
        throw KTooLarge(cfg.k, dict.cols());
    }
    if (cfg.max_iters < 1) {
        throw InvalidArgument("max_iters must be at least 1");
    }
    if (cfg.residual_tol && !(*cfg.residual_tol >= 0.0)) {
        throw InvalidArgument("residual_tol must be non-negative");
    }
}

void record(PursuitTrace* trace, double norm, const IndexSet& support) {
    if (trace) {
        trace->residual_norms.push_back(norm);
        trace->supports.push_back(support);
    }
}

/// Index of the largest |e| not flagged in `taken`; -1 when every candidate is zero.
int strongest_unselected(const Vector& e, const std::vector<char>& taken) {
    int best = -1;
    double best_mag = 0.0;
    for (Eigen::Index j = 0; j < e.size(); ++j) {
        const double mag = std::abs(e[j]);
        if (!taken[static_cast<std::size_t>(j)] && mag > best_mag) {
            best = static_cast<int>(j);
            best_mag = mag;
        }
    }
    return best;
}

}  // namespace

double effective_tolerance(const PursuitConfig& cfg, const Vector& x) {
    return cfg.residual_tol ? *cfg.residual_tol : kDefaultRelativeTolerance * x.norm();
}

SparseSolution run_mp(const Dictionary& dict, const Vector& x, const PursuitConfig& cfg, PursuitTrace* trace) {
    validate(dict, x, cfg);
    const double tol = effective_tolerance(cfg, x);

    SparseSolution out;
    std::vector<double> coefficient;
    Vector r = x;
    record(trace, r.norm(), out.support);

    while (r.norm() > tol && out.iterations < cfg.max_iters &&
           static_cast<int>(out.support.size()) < cfg.k) {
        const Vector e = dict.project(r);
        out.bottom_up_transfers += dict.transfer_cost();
        const int pick = max_ind(e, 1).front();
        const double step = e[pick];
        if (step == 0.0) {
            break;
        }
        const auto it = std::find(out.support.begin(), out.support.end(), pick);
        if (it == out.support.end()) {
            out.support.push_back(pick);
            coefficient.push_back(step);
        } else {
            coefficient[static_cast<std::size_t>(it - out.support.begin())] += step;
        }
        r.noalias() -= step * dict.column(pick);
        ++out.iterations;
        record(trace, r.norm(), out.support);
        if (trace) {
            trace->step_projections.push_back(step);
        }
    }

    out.values = Eigen::Map<const Vector>(coefficient.data(), static_cast<Eigen::Index>(coefficient.size()));
    out.residual_norm = (x - dict.restrict(out.support) * out.values).norm();
    return out;
}

SparseSolution run_omp(const Dictionary& dict, const Vector& x, const PursuitConfig& cfg, PursuitTrace* trace) {
    validate(dict, x, cfg);
    if (cfg.k > dict.rows()) {
        throw KTooLarge(cfg.k, dict.rows());
    }
    const double tol = effective_tolerance(cfg, x);

    SparseSolution out;
    std::vector<char> taken(static_cast<std::size_t>(dict.cols()), 0);
    Projection current{x, Vector(0)};
    double norm = x.norm();
    record(trace, norm, out.support);

    while (norm > tol && out.iterations < cfg.max_iters && static_cast<int>(out.support.size()) < cfg.k) {
        const Vector e = dict.project(current.residual);
        out.bottom_up_transfers += dict.transfer_cost();
        const int pick = strongest_unselected(e, taken);
        if (pick < 0) {
            break;
        }
        taken[static_cast<std::size_t>(pick)] = 1;
        out.support.push_back(pick);
        current = residual(dict, out.support, x);
        norm = current.residual.norm();
        ++out.iterations;
        record(trace, norm, out.support);
    }

    out.values = std::move(current.coefficients);
    out.residual_norm = norm;
    return out;
}

SparseSolution run_sp(const Dictionary& dict, const Vector& x, const PursuitConfig& cfg, PursuitTrace* trace) {
    validate(dict, x, cfg);
    const int k = cfg.k;
    if (2 * k > dict.rows()) {
        throw KTooLarge(2L * k, dict.rows());
    }
    const double tol = effective_tolerance(cfg, x);

    SparseSolution out;
    out.support = max_ind(dict.project(x), k);
    out.bottom_up_transfers += dict.transfer_cost();
    Projection current = residual(dict, out.support, x);
    double norm = current.residual.norm();
    record(trace, norm, out.support);

    for (int t = 1; t <= cfg.max_iters && k > 0; ++t) {
        const IndexSet expansion = max_ind(dict.project(current.residual), k);
        out.bottom_up_transfers += dict.transfer_cost();

        IndexSet merged = out.support;
        for (int j : expansion) {
            if (std::find(merged.begin(), merged.end(), j) == merged.end()) {
                merged.push_back(j);
            }
        }
        const Vector merged_coefficients = restricted_ls_solve(dict, merged, x);
        IndexSet candidate;
        candidate.reserve(static_cast<std::size_t>(k));
        for (int position : max_ind(merged_coefficients, k)) {
            candidate.push_back(merged[static_cast<std::size_t>(position)]);
        }

        Projection next = residual(dict, candidate, x);
        const double next_norm = next.residual.norm();
        out.iterations = t;

        // A candidate that is not strictly better is discarded even when both are
        // below tolerance, so accepted residuals never increase.
        if (next_norm >= norm) {
            if (trace) {
                trace->rejected_residual = next_norm;
                trace->rejected_support = candidate;
            }
            break;
        }
        out.support = std::move(candidate);
        current = std::move(next);
        norm = next_norm;
        record(trace, norm, out.support);
        if (norm <= tol) {
            break;
        }
    }

    out.values = std::move(current.coefficients);
    out.residual_norm = norm;
    return out;
}

}  // namespace sparsekit
