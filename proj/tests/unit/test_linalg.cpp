#include "sparsekit/errors.hpp"
#include "sparsekit/linalg.hpp"
#include "sparsekit/rng.hpp"
#include "sparsekit/synth.hpp"
#include "support/test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace sparsekit;
using sparsekit::testing::random_orthonormal;

namespace {

Vector random_vector(int size, std::uint64_t seed) {
    Rng rng(seed);
    Vector v(size);
    for (int i = 0; i < size; ++i) v[i] = rng.normal();
    return v;
}

}  // namespace

TEST_CASE("normalize_columns keeps an identity matrix") {
    const Dictionary d = normalize_columns(Matrix::Identity(3, 3));
    CHECK(d.matrix() == Matrix::Identity(3, 3));
}

TEST_CASE("normalize_columns scales a 3-4-5 column") {
    Matrix m(2, 1);
    m << 3.0, 4.0;
    const Dictionary d = normalize_columns(m);
    CHECK(d.matrix()(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(d.matrix()(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("normalized Gaussian columns have unit norm by an independent sum") {
    const Dictionary d = normalize_columns(gen_gaussian_entries(8, 16, 11));
    for (int j = 0; j < 16; ++j) {
        // Sum of squares in reverse row order, independent of Eigen's reduction.
        double sum = 0.0;
        for (int i = 7; i >= 0; --i) sum += d.matrix()(i, j) * d.matrix()(i, j);
        CHECK(std::abs(std::sqrt(sum) - 1.0) <= 1e-12);
    }
}

TEST_CASE("normalize_columns rejects a zero column and is idempotent") {
    Matrix m = Matrix::Ones(3, 3);
    m.col(1).setZero();
    try {
        normalize_columns(m);
        FAIL("expected ZeroColumn");
    } catch (const ZeroColumn& e) {
        CHECK(e.column() == 1);
    }
    m.col(1) << 1e-13, 0, 0;
    CHECK_THROWS_AS(normalize_columns(m), ZeroColumn);

    const Dictionary once = normalize_columns(gen_gaussian_entries(5, 9, 3));
    const Dictionary twice = normalize_columns(once.matrix());
    CHECK((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("from_unit_columns validates norms") {
    CHECK_NOTHROW(Dictionary::from_unit_columns(Matrix::Identity(2, 2)));
    CHECK_THROWS_AS(Dictionary::from_unit_columns(2.0 * Matrix::Identity(2, 2)), InvalidArgument);
}

TEST_CASE("max_ind orders by magnitude") {
    Vector v(3);
    v << 0.1, -0.9, 0.5;
    CHECK(max_ind(v, 2) == IndexSet{1, 2});

    v << 5, 5, 1;
    CHECK(max_ind(v, 2) == IndexSet{0, 1});

    CHECK(max_ind(v, 0).empty());
    CHECK_THROWS_AS(max_ind(v, 4), KTooLarge);
}

TEST_CASE("max_ind matches a full-sort oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Vector v = random_vector(50, seed);
        IndexSet all(50);
        std::iota(all.begin(), all.end(), 0);
        std::sort(all.begin(), all.end(), [&](int a, int b) {
            return std::abs(v[a]) != std::abs(v[b]) ? std::abs(v[a]) > std::abs(v[b]) : a < b;
        });
        all.resize(7);
        CHECK(max_ind(v, 7) == all);
    }
}

TEST_CASE("max_ind is permutation equivariant") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const Vector v = random_vector(30, seed + 100);
        Rng rng(seed);
        std::vector<int> perm(30);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = 29; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        // permuted[perm[i]] = v[i]
        Vector permuted(30);
        for (int i = 0; i < 30; ++i) permuted[perm[i]] = v[i];

        const IndexSet original = max_ind(v, 10);
        IndexSet mapped;
        for (int i : original) mapped.push_back(perm[i]);
        CHECK(max_ind(permuted, 10) == mapped);
    }
}

TEST_CASE("restricted_ls_solve on orthonormal and single columns") {
    const Dictionary id = normalize_columns(Matrix::Identity(4, 4));
    Vector x(4);
    x << 0, 3, 0, -1;
    const Vector c = restricted_ls_solve(id, {1, 3}, x);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == doctest::Approx(3.0));
    CHECK(c[1] == doctest::Approx(-1.0));

    Matrix col(2, 1);
    col << 0.6, 0.8;
    const Dictionary single = normalize_columns(col);
    Vector y(2);
    y << 0.6, 0.8;
    CHECK(restricted_ls_solve(single, {0}, y)[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("restricted_ls_solve agrees with the normal equations") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dictionary d = gen_dictionary(6, 3, seed);
        const Vector x = random_vector(6, seed + 50);
        const Matrix& a = d.matrix();
        const Vector oracle = (a.transpose() * a).inverse() * (a.transpose() * x);
        const Vector c = restricted_ls_solve(d, {0, 1, 2}, x);
        CHECK((c - oracle).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("restricted_ls_solve detects rank deficiency") {
    Matrix m(3, 3);
    m << 1, 1, 0,
         0, 0, 1,
         0, 0, 0;
    const Dictionary d = normalize_columns(m);
    const Vector x = Vector::Ones(3);
    CHECK_THROWS_AS(restricted_ls_solve(d, {0, 1}, x), RankDeficient);
    CHECK_NOTHROW(restricted_ls_solve(d, {0, 2}, x));
    // more columns than rows
    const Dictionary wide = gen_dictionary(3, 5, 1);
    CHECK_THROWS_AS(restricted_ls_solve(wide, {0, 1, 2, 3}, x), RankDeficient);
}

TEST_CASE("residual edge cases") {
    const Dictionary q = random_orthonormal(5, 4);
    const Vector x = random_vector(5, 9);
    CHECK(residual(q, {0, 1, 2, 3, 4}, x).residual.norm() <= 1e-12);

    const Projection empty = residual(q, {}, x);
    CHECK(empty.coefficients.size() == 0);
    CHECK(empty.residual == x);

    const Dictionary d = gen_dictionary(8, 16, 21);
    const ProblemInstance inst = gen_instance(d, 3, 22);
    CHECK(residual(d, inst.true_support, inst.signal).residual.norm() < 1e-9);
}

TEST_CASE("least-squares residual is orthogonal to the selected columns") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Dictionary d = gen_dictionary(12, 30, seed);
        const Vector x = random_vector(12, seed + 1000);
        Rng rng(seed);
        IndexSet support;
        const int size = 1 + static_cast<int>(rng.below(8));
        while (static_cast<int>(support.size()) < size) {
            const int j = static_cast<int>(rng.below(30));
            if (std::find(support.begin(), support.end(), j) == support.end()) support.push_back(j);
        }
        const Projection p = residual(d, support, x);
        for (int j : support) {
            CHECK(std::abs(d.column(j).dot(p.residual)) <= 1e-8 * x.norm());
        }
        CHECK(p.residual.norm() <= x.norm() + 1e-9);
    }
}

TEST_CASE("prune_negligible drops zero coefficients") {
    const Dictionary d = gen_dictionary(8, 12, 5);
    const ProblemInstance inst = gen_instance(d, 2, 6);
    IndexSet support = inst.true_support;
    support.push_back(inst.true_support[0] == 0 ? 1 : 0);
    SparseSolution s = solution_for_support(d, support, inst.signal);
    s.iterations = 3;
    const SparseSolution pruned = prune_negligible(d, inst.signal, s, 1e-9 * inst.signal.norm());
    CHECK(pruned.support == inst.true_support);
    CHECK(pruned.iterations == 3);
    CHECK(pruned.residual_norm < 1e-9);
}
