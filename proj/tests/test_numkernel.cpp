#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlat/errors.hpp"
#include "mlat/geometry.hpp"
#include "mlat/lateration.hpp"
#include "mlat/numkernel.hpp"
#include "support.hpp"

using namespace mlat;
using testing::Rng;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an mlat::Error");
    return ErrorKind::InvalidArgument;
}

Matrix permuted(const Matrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    return a.submatrix(rows, cols);
}

}  // namespace

TEST_CASE("matrix rejects bad entry counts and non-finite values") {
    CHECK(kind_of([] { Matrix(2, 2, {1, 2, 3}); }) == ErrorKind::LengthMismatch);
    CHECK(kind_of([] { Matrix(1, 2, {1, std::nan("")}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { Matrix(1, 1, {std::numeric_limits<double>::infinity()}); }) == ErrorKind::InvalidArgument);
    const Matrix m{{1, 2}, {3, 4}};
    CHECK(m.rows() == 2);
    CHECK(m(1, 0) == 3);
    CHECK(m.transposed()(0, 1) == 3);
}

TEST_CASE("least squares: identity and the mean of two observations") {
    const auto x = least_squares_solve(Matrix::identity(3), std::vector<double>{1, 2, 3});
    CHECK(x[0] == doctest::Approx(1).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(2).epsilon(1e-14));
    CHECK(x[2] == doctest::Approx(3).epsilon(1e-14));
    const auto mean = least_squares_solve(Matrix{{1}, {1}}, std::vector<double>{0, 2});
    CHECK(mean[0] == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("least squares on the three-sensor planar system recovers the origin") {
    // Rows (2 a_i, -1); right-hand side ||a_i||^2 - t_i^2 for a source at the
    // origin emitting at time 0, which vanishes.
    const Matrix at{{8, 0, -1}, {-6, 8, -1}, {-6, -8, -1}};
    const std::vector<double> ai2{16, 25, 25};
    const std::vector<double> ti{4, 5, 5};
    std::vector<double> b(3);
    for (int i = 0; i < 3; ++i) b[i] = ai2[i] - ti[i] * ti[i];
    const auto x = least_squares_solve(at, b);
    CHECK(std::abs(x[0]) < 1e-14);
    CHECK(std::abs(x[1]) < 1e-14);
    CHECK(std::abs(x[2]) < 1e-14);
}

TEST_CASE("least squares errors") {
    CHECK(kind_of([] { least_squares_solve(Matrix::identity(2), std::vector<double>{1}); }) ==
          ErrorKind::LengthMismatch);
    CHECK(kind_of([] { least_squares_solve(Matrix{{1, 2}, {2, 4}}, std::vector<double>{1, 2}); }) ==
          ErrorKind::RankDeficient);
    CHECK(kind_of([] { least_squares_solve(Matrix{{1, 2}}, std::vector<double>{1}); }) ==
          ErrorKind::RankDeficient);
}

TEST_CASE("least squares residual is orthogonal to the column space") {
    Rng rng(101);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 1 + rng() % 6;
        const std::size_t m = k + rng() % (11 - k);
        std::vector<double> e(m * k);
        for (double& v : e) v = testing::gaussian(rng);
        const Matrix a(m, k, e);
        if (numeric_rank(a) < k) continue;
        std::vector<double> b(m);
        for (double& v : b) v = testing::gaussian(rng);
        const auto x = least_squares_solve(a, b);
        auto r = multiply(a, x);
        for (std::size_t i = 0; i < m; ++i) r[i] -= b[i];
        const double bound = 1e-9 * singular_values(a)[0] * norm(b);
        const auto g = multiply(a.transposed(), r);
        for (double v : g) CHECK(std::abs(v) <= bound);
    }
}

TEST_CASE("numeric rank: identity, zero matrix and the ambiguous five-sensor A") {
    CHECK(numeric_rank(Matrix::identity(5), 1e-10) == 5);
    CHECK(numeric_rank(Matrix::zeros(3, 4)) == 0);
    const SensorArray s({{3, 4, 0}, {-2, -2, 1}, {-1, 0, 0}, {0, -48.0 / 21, 14.0 / 21}, {0, 76.0 / 21, 0}});
    const std::vector<double> t{5, 3, 1, 50.0 / 21, 76.0 / 21};
    CHECK(numeric_rank(build_a(s, t)) == 4);
}

TEST_CASE("numeric rank of a constructed rank-4 matrix agrees with exact elimination") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix base = testing::random_integer_matrix(rng, 4, 5, 9);
        std::vector<double> e(base.entries().begin(), base.entries().end());
        // Fifth row: an integer combination of the others.
        std::uniform_int_distribution<int> c(-3, 3);
        std::vector<int> w(4);
        for (int& v : w) v = c(rng);
        for (std::size_t j = 0; j < 5; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < 4; ++i) s += w[i] * base(i, j);
            e.push_back(s);
        }
        const Matrix a(5, 5, e);
        const std::size_t exact = testing::exact_rank(testing::to_rational(a));
        CHECK(numeric_rank(a) == exact);
        CHECK(exact <= 4);
    }
}

TEST_CASE("numeric rank is invariant under permutations and scaling") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = 2 + rng() % 5;
        const std::size_t c = 2 + rng() % 5;
        const std::size_t k = 1 + rng() % std::min(r, c);
        // Product of r x k and k x c has rank k generically.
        const Matrix left = testing::random_integer_matrix(rng, r, k, 5);
        const Matrix right = testing::random_integer_matrix(rng, k, c, 5);
        std::vector<double> e(r * c, 0.0);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                for (std::size_t l = 0; l < k; ++l) e[i * c + j] += left(i, l) * right(l, j);
        const Matrix a(r, c, e);
        const std::size_t rank = numeric_rank(a);
        CHECK(rank == testing::exact_rank(testing::to_rational(a)));
        std::vector<std::size_t> rp(r), cp(c);
        std::iota(rp.begin(), rp.end(), 0);
        std::iota(cp.begin(), cp.end(), 0);
        std::shuffle(rp.begin(), rp.end(), rng);
        std::shuffle(cp.begin(), cp.end(), rng);
        CHECK(numeric_rank(permuted(a, rp, cp)) == rank);
        for (double s : {1e-6, -3.0, 1e6}) CHECK(numeric_rank(a.scaled(s)) == rank);
    }
}

TEST_CASE("determinant: identity, zero and 2x2 closed form") {
    CHECK(determinant(Matrix::identity(5)) == 1.0);
    CHECK(determinant(Matrix::zeros(5, 5)) == 0.0);
    Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = testing::gaussian(rng), b = testing::gaussian(rng);
        const double c = testing::gaussian(rng), d = testing::gaussian(rng);
        const double ref = a * d - b * c;
        CHECK(determinant(Matrix{{a, b}, {c, d}}) ==
              doctest::Approx(ref).epsilon(1e-12).scale(std::abs(a * d) + std::abs(b * c)));
    }
    CHECK_THROWS_AS(determinant(Matrix::identity(9)), Error);
    CHECK_THROWS_AS(determinant(Matrix::zeros(2, 3)), Error);
}

TEST_CASE("determinant agrees with the exact rational oracle up to 6x6") {
    Rng rng(4);
    for (int trial = 0; trial < 600; ++trial) {
        const std::size_t k = 1 + trial % 6;
        const Matrix a = testing::random_integer_matrix(rng, k, k, 20);
        const double exact = testing::exact_determinant(testing::to_rational(a)).get_d();
        // Hadamard bound gives the natural scale of the rounding error.
        double scale = 1.0;
        for (std::size_t r = 0; r < k; ++r) scale *= std::max(1.0, norm(a.row(r)));
        CHECK(std::abs(determinant(a) - exact) <= 1e-12 * scale);
        std::vector<double> scratch(a.entries().begin(), a.entries().end());
        CHECK(determinant_in_place(scratch, k) == determinant(a));
    }
}

TEST_CASE("quadratic examples") {
    using K = QuadraticRoots::Kind;
    auto r = solve_quadratic(1, 0, -4, 1e-12);
    CHECK(r.kind == K::TwoReal);
    REQUIRE(r.roots.size() == 2);
    CHECK(r.roots[0] == doctest::Approx(-2).epsilon(1e-15));
    CHECK(r.roots[1] == doctest::Approx(2).epsilon(1e-15));

    r = solve_quadratic(0, 2, 0, 1e-9);
    CHECK(r.kind == K::DegenerateLinear);
    REQUIRE(r.roots.size() == 1);
    CHECK(r.roots[0] == 0.0);

    r = solve_quadratic(38173.0 / 3025, 152.0 / 55, 0, 1e-9);
    CHECK(r.kind == K::TwoReal);
    REQUIRE(r.roots.size() == 2);
    CHECK(testing::rel_err(r.roots[0], -8360.0 / 38173) <= 1e-12);
    CHECK(r.roots[1] == 0.0);

    CHECK(solve_quadratic(1, 0, 1, 1e-9).kind == K::NoReal);
    CHECK(solve_quadratic(0, 0, 1, 1e-9).kind == K::DegenerateAll);
    r = solve_quadratic(1, -2, 1, 1e-9);
    CHECK(r.kind == K::OneReal);
    CHECK(r.roots == std::vector<double>{1.0});
}

TEST_CASE("quadratic roots satisfy the residual bound and the kind invariants") {
    using K = QuadraticRoots::Kind;
    Rng rng(5);
    for (int trial = 0; trial < 20000; ++trial) {
        const double s = std::pow(10.0, testing::uniform(rng, -3, 3));
        double a = s * testing::gaussian(rng), b = s * testing::gaussian(rng), c = s * testing::gaussian(rng);
        if (trial % 5 == 0) c = 0.0;
        if (trial % 7 == 0) b = 2 * std::sqrt(std::abs(a * c)) * (c * a >= 0 ? 1 : -1);  // near double root
        const auto r = solve_quadratic(a, b, c, 1e-9);
        switch (r.kind) {
            case K::TwoReal: CHECK(r.roots.size() == 2); CHECK(r.roots[0] <= r.roots[1]); break;
            case K::OneReal:
            case K::DegenerateLinear: CHECK(r.roots.size() == 1); break;
            case K::NoReal:
            case K::DegenerateAll: CHECK(r.roots.empty()); break;
        }
        if (r.kind == K::DegenerateLinear || r.kind == K::DegenerateAll) continue;
        const double m = std::max({std::abs(a), std::abs(b), std::abs(c)});
        for (double x : r.roots) CHECK(std::abs(a * x * x + b * x + c) <= 1e-9 * m * std::max(1.0, x * x));
    }
}
