#include "sparsekit/synth.hpp"

#include "sparsekit/errors.hpp"
#include "sparsekit/parallel.hpp"
#include "sparsekit/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <limits>
#include <numeric>

namespace sparsekit {

namespace {

constexpr std::uint64_t kDictionaryStream = 0xD1C7;
constexpr std::uint64_t kInstanceStream = 0x1257;

struct Candidate {
    double residual = std::numeric_limits<double>::infinity();
    IndexSet support;

    bool better_than(const Candidate& other) const {
        if (residual != other.residual) {
            return residual < other.residual;
        }
        return support < other.support;
    }
};

/// Lexicographic successor of an ascending k-subset of [0, m). False past the last.
bool next_combination(IndexSet& comb, int m) {
    const int k = static_cast<int>(comb.size());
    int i = k - 1;
    while (i >= 0 && comb[i] == m - k + i) {
        --i;
    }
    if (i < 0) {
        return false;
    }
    ++comb[i];
    for (int j = i + 1; j < k; ++j) {
        comb[j] = comb[j - 1] + 1;
    }
    return true;
}

/// The combination at lexicographic position `rank`.
IndexSet unrank_combination(std::uint64_t rank, int m, int k) {
    IndexSet comb;
    comb.reserve(static_cast<std::size_t>(k));
    int next = 0;
    for (int slot = 0; slot < k; ++slot) {
        for (int v = next;; ++v) {
            const std::uint64_t with_v = binomial(static_cast<std::uint64_t>(m - v - 1),
                                                  static_cast<std::uint64_t>(k - slot - 1));
            if (rank < with_v) {
                comb.push_back(v);
                next = v + 1;
                break;
            }
            rank -= with_v;
        }
    }
    return comb;
}

double subset_residual(const Dictionary& dict, const IndexSet& support, const Vector& x) {
    try {
        return residual(dict, support, x).residual.norm();
    } catch (const RankDeficient&) {
        return std::numeric_limits<double>::infinity();
    }
}

Candidate scan_range(const Dictionary& dict, const Vector& x, int k, std::uint64_t first,
                     std::uint64_t count) {
    Candidate best;
    if (count == 0) {
        return best;
    }
    const int m = static_cast<int>(dict.cols());
    IndexSet comb = unrank_combination(first, m, k);
    for (std::uint64_t i = 0; i < count; ++i) {
        Candidate current{subset_residual(dict, comb, x), comb};
        if (current.better_than(best)) {
            best = std::move(current);
        }
        if (i + 1 < count) {
            next_combination(comb, m);
        }
    }
    return best;
}

std::uint64_t checked_count(const Dictionary& dict, const Vector& x, int k, std::uint64_t budget) {
    if (x.size() != dict.rows()) {
        throw InvalidArgument("signal length does not match dictionary rows");
    }
    if (k < 0 || k > dict.cols()) {
        throw KTooLarge(k, dict.cols());
    }
    const std::uint64_t count = binomial(static_cast<std::uint64_t>(dict.cols()), static_cast<std::uint64_t>(k));
    if (count > budget) {
        throw BudgetExceeded(count, budget);
    }
    return count;
}

SparseSolution finish(const Dictionary& dict, const Vector& x, int k, const Candidate& best) {
    if (!(best.residual < std::numeric_limits<double>::infinity())) {
        throw RankDeficient(dict.rows(), k);
    }
    return solution_for_support(dict, best.support, x);
}

}  // namespace

Matrix gen_gaussian_entries(int n, int m, std::uint64_t seed) {
    if (n < 1 || m < 1) {
        throw InvalidArgument("dictionary dimensions must be positive");
    }
    Rng rng = Rng::derive(seed, {kDictionaryStream});
    Matrix entries(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            entries(i, j) = rng.normal();
        }
    }
    return entries;
}

Dictionary gen_dictionary(int n, int m, std::uint64_t seed) {
    return normalize_columns(gen_gaussian_entries(n, m, seed));
}

ProblemInstance gen_instance(const Dictionary& dict, int k, std::uint64_t seed,
                             const InstanceOptions& options) {
    const int m = static_cast<int>(dict.cols());
    if (k < 0 || k > m) {
        throw KTooLarge(k, m);
    }
    Rng rng = Rng::derive(seed, {kInstanceStream});
    IndexSet pool(static_cast<std::size_t>(m));
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first k slots become the support.
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());

    Vector values = Vector::Ones(k);
    if (options.signed_values) {
        for (int i = 0; i < k; ++i) {
            if ((rng() >> 63) != 0) {
                values[i] = -1.0;
            }
        }
    }
    return make_instance(dict, std::move(pool), std::move(values), seed);
}

ProblemInstance make_instance(Dictionary dict, IndexSet support, Vector values, std::uint64_t seed) {
    if (static_cast<Eigen::Index>(support.size()) != values.size()) {
        throw InvalidArgument("support and values differ in length");
    }
    Vector signal = Vector::Zero(dict.rows());
    for (std::size_t i = 0; i < support.size(); ++i) {
        signal.noalias() += values[static_cast<Eigen::Index>(i)] * dict.column(support[i]);
    }
    return ProblemInstance{std::move(dict), std::move(support), std::move(values), std::move(signal), seed};
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i stays exact because C(n-k+i, i) is an integer.
        const __uint128_t wide = static_cast<__uint128_t>(result) * (n - k + i) / i;
        if (wide > std::numeric_limits<std::uint64_t>::max()) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        result = static_cast<std::uint64_t>(wide);
    }
    return result;
}

SparseSolution exhaustive_oracle_serial(const Dictionary& dict, const Vector& x, int k,
                                        std::uint64_t budget) {
    const std::uint64_t count = checked_count(dict, x, k, budget);
    return finish(dict, x, k, scan_range(dict, x, k, 0, count));
}

SparseSolution exhaustive_oracle(const Dictionary& dict, const Vector& x, int k, std::uint64_t budget) {
    const std::uint64_t count = checked_count(dict, x, k, budget);
    if (!should_parallelize() || count < 1024) {
        return finish(dict, x, k, scan_range(dict, x, k, 0, count));
    }
    const int threads = thread_limit();
    const std::uint64_t chunks = static_cast<std::uint64_t>(threads) * 16;
    const std::uint64_t chunk = (count + chunks - 1) / chunks;
    std::vector<Candidate> partial(static_cast<std::size_t>(chunks));

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        const std::uint64_t first = static_cast<std::uint64_t>(c) * chunk;
        if (first < count) {
            partial[static_cast<std::size_t>(c)] =
                scan_range(dict, x, k, first, std::min(chunk, count - first));
        }
    }

    Candidate best;
    for (const auto& candidate : partial) {
        if (candidate.better_than(best)) {
            best = candidate;
        }
    }
    return finish(dict, x, k, best);
}

}  // namespace sparsekit
