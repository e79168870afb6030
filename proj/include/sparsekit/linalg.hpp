#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace sparsekit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Ordered sequence of distinct zero-based column indices. Order is
/// meaningful: max_ind returns indices by decreasing magnitude.
/// Files and CLI output use one-based indices; conversion happens at IO.
using IndexSet = std::vector<int>;

/// Tolerance on column norms accepted by Dictionary::from_unit_columns.
inline constexpr double kUnitNormTolerance = 1e-9;
/// Columns whose norm falls below this are rejected by normalize_columns.
inline constexpr double kZeroColumnNorm = 1e-12;
/// Relative pivot threshold for restricted least squares.
inline constexpr double kRankTolerance = 1e-10;

/// N x M matrix whose columns all have unit Euclidean norm.
class Dictionary {
public:
    /// Adopts a matrix whose columns are already unit norm (within 1e-9).
    /// Throws InvalidArgument otherwise.
    static Dictionary from_unit_columns(Matrix entries);

    const Matrix& matrix() const noexcept { return entries_; }
    Eigen::Index rows() const noexcept { return entries_.rows(); }
    Eigen::Index cols() const noexcept { return entries_.cols(); }
    auto column(Eigen::Index j) const { return entries_.col(j); }

    /// D^T r. One bottom-up transfer of rows()*cols() multiplications.
    Vector project(const Vector& r) const { return entries_.transpose() * r; }
    std::int64_t transfer_cost() const noexcept {
        return static_cast<std::int64_t>(entries_.rows()) * entries_.cols();
    }

    /// Columns selected by `support`, in support order.
    Matrix restrict(const IndexSet& support) const;

    friend bool operator==(const Dictionary& a, const Dictionary& b) {
        return a.entries_.rows() == b.entries_.rows() && a.entries_.cols() == b.entries_.cols() &&
               a.entries_ == b.entries_;
    }

private:
    friend Dictionary normalize_columns(const Matrix& entries);
    explicit Dictionary(Matrix entries) : entries_(std::move(entries)) {}

    Matrix entries_;
};

/// Outcome of any solver in the toolkit.
struct SparseSolution {
    IndexSet support;
    Vector values;                         // same length as support
    double residual_norm = 0.0;            // ||x - D[support] values||_2
    long iterations = 0;
    std::int64_t bottom_up_transfers = 0;  // (number of D^T applications) * N * M
};

/// Scales every column to unit norm. Throws ZeroColumn for a column with norm < 1e-12.
Dictionary normalize_columns(const Matrix& entries);

/// The k indices of largest |v|, by decreasing magnitude, ties to the lower index.
/// Throws KTooLarge when k > v.size().
IndexSet max_ind(const Vector& v, int k);

/// argmin_c ||x - D[support] c||_2 through a column-pivoted QR factorization.
/// Throws RankDeficient when the numerical rank (pivot threshold 1e-10 relative
/// to the largest pivot) is below |support|.
Vector restricted_ls_solve(const Dictionary& dict, const IndexSet& support, const Vector& x);

struct Projection {
    Vector residual;      // x - D[support] c
    Vector coefficients;  // c
};

/// Residual of x after least-squares projection onto span(D[support]).
Projection residual(const Dictionary& dict, const IndexSet& support, const Vector& x);

/// Builds a SparseSolution for `support` by least squares; residual_norm is recomputed.
SparseSolution solution_for_support(const Dictionary& dict, const IndexSet& support, const Vector& x);

/// Drops indices whose coefficient magnitude is at most `tolerance` and
/// re-solves on the remaining columns. Counters are carried over.
SparseSolution prune_negligible(const Dictionary& dict, const Vector& x, SparseSolution solution,
                                double tolerance);

/// support sorted ascending; used for set comparisons and reports.
IndexSet sorted(IndexSet support);

}  // namespace sparsekit
