#pragma once

#include "sparsekit/linalg.hpp"

#include <cstdint>

namespace sparsekit {

/// A planted sparse-coding problem: signal = dictionary[true_support] * true_values.
struct ProblemInstance {
    Dictionary dictionary;
    IndexSet true_support;  // ascending
    Vector true_values;
    Vector signal;
    std::uint64_t seed = 0;

    int k() const noexcept { return static_cast<int>(true_support.size()); }
    /// Sparsity ratio K/M.
    double sparsity() const noexcept {
        return static_cast<double>(true_support.size()) / static_cast<double>(dictionary.cols());
    }
};

struct InstanceOptions {
    /// Coefficients are +1 by default; when set each is +1 or -1 with equal probability.
    bool signed_values = false;
};

/// N x M matrix of i.i.d. standard normals (column-major draw order) before normalization.
Matrix gen_gaussian_entries(int n, int m, std::uint64_t seed);

/// Gaussian dictionary with unit columns; bit-identical for identical (n, m, seed).
Dictionary gen_dictionary(int n, int m, std::uint64_t seed);

/// k distinct uniformly drawn columns with binary coefficients. Throws KTooLarge if k > M.
ProblemInstance gen_instance(const Dictionary& dict, int k, std::uint64_t seed,
                             const InstanceOptions& options = {});

/// Planted instance from explicit support and coefficient values.
ProblemInstance make_instance(Dictionary dict, IndexSet support, Vector values, std::uint64_t seed);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept;

inline constexpr std::uint64_t kDefaultOracleBudget = 2'000'000;

/// Minimum-residual k-subset by exhaustive enumeration (ties go to the
/// lexicographically smallest ascending support). Rank-deficient subsets are
/// skipped. Throws BudgetExceeded when C(M, k) > budget. The enumeration is
/// split across OpenMP threads when allowed; the result never depends on the
/// schedule.
SparseSolution exhaustive_oracle(const Dictionary& dict, const Vector& x, int k,
                                 std::uint64_t budget = kDefaultOracleBudget);

/// Single-threaded reference enumeration, kept for cross-checking the parallel kernel.
SparseSolution exhaustive_oracle_serial(const Dictionary& dict, const Vector& x, int k,
                                        std::uint64_t budget = kDefaultOracleBudget);

}  // namespace sparsekit
