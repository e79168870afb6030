#include "sparsekit/ce.hpp"

#include "sparsekit/errors.hpp"
#include "sparsekit/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sparsekit {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

Mask draw_one(const Vector& p, Rng rng) {
    Mask y(static_cast<std::size_t>(p.size()));
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        y[static_cast<std::size_t>(j)] = rng.uniform() < p[j] ? 1 : 0;
    }
    return y;
}

}  // namespace

CEConfig CEConfig::benchmark_defaults(int k) {
    CEConfig cfg;
    cfg.population = 500;
    cfg.elite_ratio = 0.05;
    cfg.step_size = 0.1;
    cfg.max_iters = 100;
    cfg.expected_k = k;
    return cfg;
}

void CEConfig::validate() const {
    if (population < 1) {
        throw InvalidArgument("population must be positive");
    }
    if (!(elite_ratio > 0.0 && elite_ratio < 1.0)) {
        throw InvalidArgument("elite ratio must lie in (0, 1)");
    }
    if (!(step_size > 0.0 && step_size <= 1.0)) {
        throw InvalidArgument("step size must lie in (0, 1]");
    }
    if (max_iters < 1) {
        throw InvalidArgument("max_iters must be at least 1");
    }
    if (stop_eps && !(*stop_eps >= 0.0)) {
        throw InvalidArgument("stop epsilon must be non-negative");
    }
    if (!(lambda >= 0.0)) {
        throw InvalidArgument("lambda must be non-negative");
    }
    if (expected_k < 1) {
        throw InvalidArgument("expected k must be positive");
    }
    if (initial_p && ((initial_p->array() < 0.0).any() || (initial_p->array() > 1.0).any())) {
        throw InvalidArgument("initial probabilities must lie in [0, 1]");
    }
}

IndexSet mask_support(const Mask& y) {
    IndexSet support;
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j]) {
            support.push_back(static_cast<int>(j));
        }
    }
    return support;
}

Mask support_mask(const IndexSet& support, Eigen::Index m) {
    Mask y(static_cast<std::size_t>(m), 0);
    for (int j : support) {
        y.at(static_cast<std::size_t>(j)) = 1;
    }
    return y;
}

MaskSample evaluate_mask(const Dictionary& dict, const Vector& x, Mask y, double lambda) {
    MaskSample sample{std::move(y), kInfinity, kInfinity};
    const IndexSet support = mask_support(sample.y);
    if (static_cast<Eigen::Index>(support.size()) > dict.rows()) {
        return sample;
    }
    try {
        sample.residual = residual(dict, support, x).residual.norm();
    } catch (const RankDeficient&) {
        return sample;
    }
    sample.cost = sample.residual + lambda * static_cast<double>(support.size());
    return sample;
}

double sparse_objective(const Dictionary& dict, const Vector& x, const Mask& y, double lambda) {
    return evaluate_mask(dict, x, y, lambda).cost;
}

std::vector<Mask> draw_samples_serial(const Vector& p, int count, const Rng& stream) {
    std::vector<Mask> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(draw_one(p, stream.fork(static_cast<std::uint64_t>(i))));
    }
    return out;
}

std::vector<Mask> draw_samples(const Vector& p, int count, const Rng& stream) {
    if (!should_parallelize()) {
        return draw_samples_serial(p, count, stream);
    }
    std::vector<Mask> out(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static) num_threads(thread_limit())
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = draw_one(p, stream.fork(static_cast<std::uint64_t>(i)));
    }
    return out;
}

std::vector<MaskSample> sample_batch_serial(const Dictionary& dict, const Vector& x, const Vector& p, int count,
                                            const Rng& stream, double lambda) {
    std::vector<MaskSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(evaluate_mask(dict, x, draw_one(p, stream.fork(static_cast<std::uint64_t>(i))), lambda));
    }
    return out;
}

std::vector<MaskSample> sample_batch(const Dictionary& dict, const Vector& x, const Vector& p, int count,
                                     const Rng& stream, double lambda) {
    if (!should_parallelize()) {
        return sample_batch_serial(dict, x, p, count, stream, lambda);
    }
    std::vector<MaskSample> out(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 8) num_threads(thread_limit())
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] =
            evaluate_mask(dict, x, draw_one(p, stream.fork(static_cast<std::uint64_t>(i))), lambda);
    }
    return out;
}

std::size_t elite_rank(double elite_ratio, std::size_t population) {
    // The relative slack absorbs products such as 0.05 * 500 landing one ulp above an integer.
    const double exact = elite_ratio * static_cast<double>(population);
    const auto rank = static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)));
    return std::clamp<std::size_t>(rank, 1, population);
}

EliteUpdate elite_update(const std::vector<MaskSample>& samples, const Vector& p, const CEConfig& cfg) {
    if (samples.empty()) {
        throw InvalidArgument("elite update needs at least one sample");
    }
    std::vector<double> costs;
    costs.reserve(samples.size());
    for (const auto& s : samples) {
        if (static_cast<Eigen::Index>(s.y.size()) != p.size()) {
            throw InvalidArgument("sample length does not match distribution length");
        }
        costs.push_back(s.cost);
    }
    const std::size_t rank = elite_rank(cfg.elite_ratio, samples.size());
    std::nth_element(costs.begin(), costs.begin() + static_cast<std::ptrdiff_t>(rank - 1), costs.end());

    EliteUpdate out;
    out.gamma = costs[rank - 1];
    out.empirical = Vector::Zero(p.size());
    for (const auto& s : samples) {
        if (s.cost <= out.gamma) {
            ++out.elite_size;
            for (std::size_t j = 0; j < s.y.size(); ++j) {
                out.empirical[static_cast<Eigen::Index>(j)] += s.y[j];
            }
        }
    }
    out.empirical /= static_cast<double>(out.elite_size);
    out.p = (cfg.step_size * out.empirical + (1.0 - cfg.step_size) * p).cwiseMax(0.0).cwiseMin(1.0);
    return out;
}

double stop_threshold(const CEConfig& cfg, const Vector& x) {
    const double eps = cfg.stop_eps ? *cfg.stop_eps : 0.1 / static_cast<double>(cfg.expected_k);
    return cfg.eps_relative ? eps * x.norm() : eps;
}

Vector initial_distribution(const CEConfig& cfg, Eigen::Index m) {
    if (cfg.initial_p) {
        if (cfg.initial_p->size() != m) {
            throw InvalidArgument("initial distribution length does not match dictionary columns");
        }
        return *cfg.initial_p;
    }
    const double uniform = std::min(1.0, static_cast<double>(cfg.expected_k) / static_cast<double>(m));
    return Vector::Constant(m, uniform);
}

CeLoopResult ce_loop(const Dictionary& dict, const Vector& x, const CEConfig& cfg, Vector& p, int iterations,
                     const Rng& stream, CeTrace* trace) {
    const double eps = stop_threshold(cfg, x);
    CeLoopResult out;
    out.best.cost = kInfinity;
    out.best.residual = kInfinity;

    for (int t = 1; t <= iterations; ++t) {
        std::vector<MaskSample> batch =
            sample_batch(dict, x, p, cfg.population, stream.fork(static_cast<std::uint64_t>(t)), cfg.lambda);
        out.iterations = t;
        for (auto& sample : batch) {
            if (sample.cost < out.best.cost) {
                out.best = sample;
            }
        }
        if (out.best.residual <= eps) {
            out.reached_eps = true;
            if (trace) {
                trace->best_costs.push_back(out.best.cost);
            }
            break;
        }
        const EliteUpdate update = elite_update(batch, p, cfg);
        p = update.p;
        if (trace) {
            trace->best_costs.push_back(out.best.cost);
            trace->gammas.push_back(update.gamma);
            trace->elite_sizes.push_back(update.elite_size);
        }
    }
    return out;
}

SparseSolution solution_from_mask(const Dictionary& dict, const Vector& x, const Mask& y, double prune_tolerance) {
    SparseSolution solution = solution_for_support(dict, mask_support(y), x);
    if (prune_tolerance >= 0.0) {
        solution = prune_negligible(dict, x, std::move(solution), prune_tolerance * x.norm());
    }
    return solution;
}

SparseSolution run_ce(const Dictionary& dict, const Vector& x, const CEConfig& cfg, const Rng& stream,
                      CeTrace* trace) {
    cfg.validate();
    if (x.size() != dict.rows()) {
        throw InvalidArgument("signal length does not match dictionary rows");
    }
    Vector p = initial_distribution(cfg, dict.cols());
    const CeLoopResult loop = ce_loop(dict, x, cfg, p, cfg.max_iters, stream, trace);

    SparseSolution out;
    if (std::isfinite(loop.best.cost)) {
        out = solution_from_mask(dict, x, loop.best.y, cfg.prune_tolerance);
    } else {
        out.values = Vector(0);
        out.residual_norm = x.norm();
    }
    out.iterations = loop.iterations;
    return out;
}

}  // namespace sparsekit
