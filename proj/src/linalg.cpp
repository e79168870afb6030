#include "sparsekit/linalg.hpp"

#include "sparsekit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparsekit {

Dictionary Dictionary::from_unit_columns(Matrix entries) {
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
        const double norm = entries.col(j).norm();
        if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
            throw InvalidArgument("dictionary column " + std::to_string(j + 1) +
                                  " is not unit norm (norm " + std::to_string(norm) + ")");
        }
    }
    return Dictionary(std::move(entries));
}

Matrix Dictionary::restrict(const IndexSet& support) const {
    Matrix out(entries_.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) {
        const int j = support[i];
        if (j < 0 || j >= entries_.cols()) {
            throw InvalidArgument("column index " + std::to_string(j + 1) + " out of range");
        }
        out.col(static_cast<Eigen::Index>(i)) = entries_.col(j);
    }
    return out;
}

Dictionary normalize_columns(const Matrix& entries) {
    Matrix out = entries;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double norm = out.col(j).norm();
        if (!(norm >= kZeroColumnNorm)) {
            throw ZeroColumn(static_cast<int>(j));
        }
        out.col(j) /= norm;
    }
    return Dictionary(std::move(out));
}

IndexSet max_ind(const Vector& v, int k) {
    if (k < 0 || k > v.size()) {
        throw KTooLarge(k, v.size());
    }
    IndexSet order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), 0);
    auto before = [&v](int a, int b) {
        const double ma = std::abs(v[a]);
        const double mb = std::abs(v[b]);
        return ma > mb || (ma == mb && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), before);
    order.resize(static_cast<std::size_t>(k));
    return order;
}

Vector restricted_ls_solve(const Dictionary& dict, const IndexSet& support, const Vector& x) {
    if (x.size() != dict.rows()) {
        throw InvalidArgument("signal length does not match dictionary rows");
    }
    if (support.empty()) {
        return Vector(0);
    }
    const Matrix restricted = dict.restrict(support);
    const auto columns = restricted.cols();
    if (columns > restricted.rows()) {
        throw RankDeficient(restricted.rows(), columns);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(restricted);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < columns) {
        throw RankDeficient(qr.rank(), columns);
    }
    return qr.solve(x);
}

Projection residual(const Dictionary& dict, const IndexSet& support, const Vector& x) {
    Projection out;
    out.coefficients = restricted_ls_solve(dict, support, x);
    out.residual = x;
    for (std::size_t i = 0; i < support.size(); ++i) {
        out.residual.noalias() -= out.coefficients[static_cast<Eigen::Index>(i)] * dict.column(support[i]);
    }
    return out;
}

SparseSolution solution_for_support(const Dictionary& dict, const IndexSet& support, const Vector& x) {
    Projection proj = residual(dict, support, x);
    SparseSolution out;
    out.support = support;
    out.values = std::move(proj.coefficients);
    out.residual_norm = proj.residual.norm();
    return out;
}

SparseSolution prune_negligible(const Dictionary& dict, const Vector& x, SparseSolution solution,
                                double tolerance) {
    IndexSet kept;
    for (std::size_t i = 0; i < solution.support.size(); ++i) {
        if (std::abs(solution.values[static_cast<Eigen::Index>(i)]) > tolerance) {
            kept.push_back(solution.support[i]);
        }
    }
    if (kept.size() == solution.support.size()) {
        return solution;
    }
    SparseSolution pruned = solution_for_support(dict, kept, x);
    pruned.iterations = solution.iterations;
    pruned.bottom_up_transfers = solution.bottom_up_transfers;
    return pruned;
}

IndexSet sorted(IndexSet support) {
    std::sort(support.begin(), support.end());
    return support;
}

}  // namespace sparsekit
