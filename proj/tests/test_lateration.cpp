#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mlat/errors.hpp"
#include "mlat/lateration.hpp"
#include "support.hpp"

using namespace mlat;
using testing::Rng;

namespace {

const SensorArray five_sensor_array() {
    return SensorArray({{3, 4, 0}, {-2, -2, 1}, {-1, 0, 0}, {0, -48.0 / 21, 14.0 / 21}, {0, 76.0 / 21, 0}});
}
const std::vector<double> five_sensor_times{5, 3, 1, 50.0 / 21, 76.0 / 21};

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an mlat::Error");
    return ErrorKind::InvalidArgument;
}

void check_event(const EmissionEvent& got, double t, const Point& x, double tol) {
    CHECK(testing::rel_err(got.time, t) <= tol);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(testing::rel_err(got.position[k], x[k]) <= tol);
}

// A rotation of R^n built from random Givens rotations.
std::vector<std::vector<double>> random_rotation(Rng& rng, std::size_t n) {
    std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) q[i][i] = 1.0;
    for (int g = 0; g < 6; ++g) {
        const std::size_t i = rng() % n;
        std::size_t j = rng() % n;
        if (i == j) j = (i + 1) % n;
        const double th = testing::uniform(rng, 0, 6.283185307179586);
        for (std::size_t r = 0; r < n; ++r) {
            const double a = q[r][i], b = q[r][j];
            q[r][i] = std::cos(th) * a - std::sin(th) * b;
            q[r][j] = std::sin(th) * a + std::cos(th) * b;
        }
    }
    return q;
}

Point apply(const std::vector<std::vector<double>>& q, const Point& p, const Point& shift) {
    Point out(p.size(), 0.0);
    for (std::size_t r = 0; r < p.size(); ++r) {
        for (std::size_t c = 0; c < p.size(); ++c) out[r] += q[r][c] * p[c];
        out[r] += shift[r];
    }
    return out;
}

}  // namespace

TEST_CASE("sensor array validation") {
    CHECK(kind_of([] { SensorArray({{0, 0}}); }) == ErrorKind::ValidationError);
    CHECK(kind_of([] { SensorArray({{0, 0}, {1, 0, 0}}); }) == ErrorKind::DimensionMismatch);
    CHECK(kind_of([] { SensorArray({{0, 0}, {0, 0}}); }) == ErrorKind::ValidationError);
    CHECK(kind_of([] { SensorArray({{0, std::nan("")}, {1, 0}}); }) == ErrorKind::ValidationError);
    CHECK(kind_of([] { SensorArray({{0}, {1}}); }) == ErrorKind::ValidationError);
    CHECK(SensorArray({{0, 0}, {1, 0}, {0, 1}}).affinely_spanning(1e-8));
    CHECK_FALSE(SensorArray({{0, 0}, {1, 0}, {2, 0}}).affinely_spanning(1e-8));
}

TEST_CASE("build_a rows") {
    const Matrix a = build_a(five_sensor_array(), five_sensor_times);
    CHECK(a.rows() == 5);
    CHECK(a.cols() == 5);
    const std::vector<double> first(a.row(0).begin(), a.row(0).end());
    CHECK(first == std::vector<double>{-10, 6, 8, 0, -1});

    const SensorArray s({{2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 1}});
    const Matrix z = build_a(s, std::vector<double>(4, 0.0));
    for (std::size_t i = 0; i < 4; ++i) CHECK(z(i, 0) == 0.0);

    Rng rng(1);
    const SensorArray r = testing::random_array(rng, 3, 6);
    std::vector<double> t(6);
    for (double& v : t) v = testing::gaussian(rng);
    const Matrix b = build_a(r, t);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(b(i, 0) == -2 * t[i]);
        for (std::size_t k = 0; k < 3; ++k) CHECK(b(i, 1 + k) == 2 * r[i][k]);
        CHECK(b(i, 4) == -1.0);
    }
    CHECK(kind_of([&] { build_a(r, std::vector<double>(5, 0.0)); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("full-rank solve on the unit-corner array") {
    const SensorArray s({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}});
    const EmissionEvent truth{0.5, {0.3, 0.2, 0.1}};
    const auto t = arrival_times(s, truth);
    CHECK(numeric_rank(build_a(s, t)) == 5);
    check_event(solve_full_rank(s, t), 0.5, {0.3, 0.2, 0.1}, 1e-9);

    std::vector<Point> moved;
    for (const auto& p : s.positions()) moved.push_back({p[0] + 10, p[1] + 10, p[2] + 10});
    check_event(solve_full_rank(SensorArray(moved), t), 0.5, {10.3, 10.2, 10.1}, 1e-9);

    std::vector<Point> six = s.positions();
    six.push_back({-0.7, 0.4, 0.9});
    const SensorArray s6(six);
    const auto ev6 = solve_full_rank(s6, arrival_times(s6, truth));
    const auto ev5 = solve_full_rank(s, t);
    CHECK(std::abs(ev6.time - ev5.time) <= 1e-9);
    CHECK(testing::max_abs_diff(ev6.position, ev5.position) <= 1e-9);

    CHECK(kind_of([] { solve_full_rank(five_sensor_array(), five_sensor_times); }) == ErrorKind::RankDeficient);
}

TEST_CASE("rank-deficient five-sensor scene has two causal solutions") {
    const SolveResult r = solve(five_sensor_array(), five_sensor_times);
    CHECK(r.path == SolvePath::Quadratic);
    CHECK(r.rank_of_a == 4);
    REQUIRE(r.candidates.size() == 2);
    const double k = -152.0 / 38173;
    check_event(r.candidates[0].event, -8360.0 / 38173, {21 * k, 34 * k, 199 * k}, 1e-9);
    check_event(r.candidates[1].event, 0.0, {0, 0, 0}, 1e-9);
    CHECK_FALSE(r.candidates[0].spurious);
    CHECK_FALSE(r.candidates[1].spurious);
    REQUIRE(r.quadratic);
    CHECK(testing::rel_err(r.quadratic->a, 38173.0 / 3025) <= 1e-9);
    CHECK(testing::rel_err(r.quadratic->b, 152.0 / 55) <= 1e-9);
    CHECK(std::abs(r.quadratic->c) <= 1e-9);
    REQUIRE(r.direction);
    CHECK(testing::max_abs_diff(*r.direction, {21.0 / 55, 34.0 / 55, 199.0 / 55}) <= 1e-9);
}

TEST_CASE("planar four-sensor scene: second causal solution") {
    const SensorArray s({{9, 12}, {9, -12}, {10, -24}, {10, 24}});
    const SolveResult r = solve(s, std::vector<double>{15, 15, 26, 26});
    CHECK(r.path == SolvePath::Quadratic);
    REQUIRE(r.candidates.size() == 2);
    check_event(r.candidates[0].event, 0.0, {0, 0}, 1e-9);
    check_event(r.candidates[1].event, 7.0 / 5, {77.0 / 5, 0}, 1e-9);
    CHECK_FALSE(r.candidates[0].spurious);
    CHECK_FALSE(r.candidates[1].spurious);
}

TEST_CASE("three-sensor planar scene: second root violates causality") {
    const SensorArray s({{4, 0}, {-3, 4}, {-3, -4}});
    const std::vector<double> t{4, 5, 5};
    const SolveResult r = solve_rank_deficient(s, t);
    REQUIRE(r.candidates.size() == 2);
    check_event(r.candidates[0].event, 0.0, {0, 0}, 1e-9);
    CHECK_FALSE(r.candidates[0].spurious);
    check_event(r.candidates[1].event, 28.0 / 3, {-4.0 / 3, 0}, 1e-9);
    CHECK(r.candidates[1].spurious);
    // The spurious root still satisfies the absolute-value model.
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& e = r.candidates[1].event;
        CHECK(std::abs(distance(s[i], e.position) - std::abs(t[i] - e.time)) <= 1e-9);
    }
}

TEST_CASE("vanishing t^2 coefficient gives a single linear root") {
    const SensorArray s({{1, 0}, {-1, 0}, {3, 4}});
    const SolveResult r = solve(s, std::vector<double>{1, 1, 5});
    REQUIRE(r.quadratic);
    CHECK(std::abs(r.quadratic->a) <= 1e-9);
    CHECK(r.root_kind == QuadraticRoots::Kind::DegenerateLinear);
    REQUIRE(r.candidates.size() == 1);
    check_event(r.candidates[0].event, 0.0, {0, 0}, 1e-9);

    // Moving the third sensor slightly sends the second root far away.
    const SensorArray s2({{1, 0}, {-1, 0}, {3, 3.99}});
    const SolveResult r2 = solve(s2, std::vector<double>{1, 1, std::hypot(3.0, 3.99)});
    REQUIRE(r2.candidates.size() == 2);
    const auto& far = r2.candidates[0].event;
    CHECK(far.time >= -1992);
    CHECK(far.time <= -1990);
    CHECK(far.position[1] >= -1993);
    CHECK(far.position[1] <= -1991);
}

TEST_CASE("equal arrival times: unique position, one spurious time") {
    const SensorArray s({{5, 0}, {0, 5}, {-3, 4}});
    const SolveResult r = solve(s, std::vector<double>{5, 5, 5});
    REQUIRE(r.direction);
    CHECK(norm(*r.direction) <= 1e-12);
    REQUIRE(r.candidates.size() == 2);
    CHECK(testing::max_abs_diff(r.candidates[0].event.position, r.candidates[1].event.position) <= 1e-12);
    CHECK(r.candidates[0].spurious != r.candidates[1].spurious);
}

TEST_CASE("source collinear with two sensors: double root") {
    const SensorArray s({{2, 0}, {1, 0}, {0, 3}});
    const SolveResult r = solve(s, std::vector<double>{2, 1, 3});
    CHECK(r.root_kind == QuadraticRoots::Kind::OneReal);
    REQUIRE(r.candidates.size() == 1);
    check_event(r.candidates[0].event, 0.0, {0, 0}, 1e-9);
}

TEST_CASE("solve errors") {
    const SensorArray line({{0, 0}, {1, 0}, {2, 0}});
    CHECK(kind_of([&] { solve(line, std::vector<double>{1, 2, 3}); }) == ErrorKind::NotSpanning);
    const SensorArray two({{0, 0}, {1, 0}});
    CHECK(kind_of([&] { solve(two, std::vector<double>{1, 2}); }) == ErrorKind::NotSpanning);
    // Times no emission event can produce: the discriminant is negative.
    const SensorArray tri({{0, 0}, {1, 0}, {0, 1}});
    CHECK(kind_of([&] { solve(tri, std::vector<double>{0, 10, -10}); }) == ErrorKind::TheoremViolation);
}

TEST_CASE("geometry condition") {
    const GeometryReport bad = check_geometry(five_sensor_array());
    CHECK(bad.noncoplanar);
    CHECK(bad.condition_applicable);
    CHECK_FALSE(bad.condition_ok);
    REQUIRE(bad.failing_sign_patterns.size() >= 1);
    CHECK(bad.failing_sign_patterns[0] == std::vector<int>{1, 1, 1, 1, 1});

    // Regular simplex plus a point off its centroid.
    const SensorArray good({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}, {0.3, 0.2, 0.45}});
    const GeometryReport ok = check_geometry(good);
    CHECK(ok.condition_ok);
    CHECK(ok.failing_sign_patterns.empty());

    const SensorArray flat4({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.2, 0.3, 1}});
    const GeometryReport f = check_geometry(flat4);
    CHECK(f.noncoplanar);
    REQUIRE(f.degenerate_subsets.size() == 1);
    CHECK(f.degenerate_subsets[0] == std::vector<std::size_t>{0, 1, 2, 3});

    const GeometryReport six = check_geometry(SensorArray({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}, {2, 0, 1}}));
    CHECK_FALSE(six.condition_applicable);
    CHECK(six.failing_sign_patterns.empty());
}

TEST_CASE("round trip: the true event is among the candidates and all causal ones fit") {
    Rng rng(2024);
    for (std::size_t n : {2u, 3u}) {
        for (int trial = 0; trial < 2000; ++trial) {
            const std::size_t m = n + 1 + rng() % 3;
            const SensorArray s = testing::random_array(rng, n, m);
            const EmissionEvent truth = testing::random_event(rng, n);
            const auto t = arrival_times(s, truth);
            const SolveResult r = solve(s, t);
            bool found = false;
            for (const auto& c : r.candidates) {
                found |= std::abs(c.event.time - truth.time) <= 1e-7 &&
                         testing::max_abs_diff(c.event.position, truth.position) <= 1e-7;
                if (!c.spurious) CHECK(model_residual(s, t, c.event) <= 1e-8 * s.diameter());
                // Every candidate fits the absolute-value model.
                for (std::size_t i = 0; i < m; ++i)
                    CHECK(std::abs(distance(s[i], c.event.position) - std::abs(t[i] - c.event.time)) <=
                          1e-8 * (s.diameter() + std::abs(c.event.time)));
            }
            CHECK(found);
            if (r.path == SolvePath::FullRank) CHECK(r.candidates.size() == 1);
            CHECK(std::is_sorted(r.candidates.begin(), r.candidates.end(),
                                 [](const Candidate& a, const Candidate& b) { return a.event.time < b.event.time; }));
        }
    }
}

TEST_CASE("solve commutes with rigid motions and time shifts") {
    Rng rng(77);
    for (std::size_t n : {2u, 3u}) {
        for (int trial = 0; trial < 500; ++trial) {
            const std::size_t m = n + 1 + rng() % 2;
            const SensorArray s = testing::random_array(rng, n, m);
            const EmissionEvent truth = testing::random_event(rng, n);
            const auto t = arrival_times(s, truth);
            const SolveResult base = solve(s, t);

            const auto q = random_rotation(rng, n);
            const Point shift = testing::random_point(rng, n, 5.0);
            std::vector<Point> moved;
            for (const auto& p : s.positions()) moved.push_back(apply(q, p, shift));
            const double dt = testing::uniform(rng, -5, 5);
            std::vector<double> t2 = t;
            for (double& v : t2) v += dt;
            const SolveResult other = solve(SensorArray(moved), t2);

            REQUIRE(other.candidates.size() == base.candidates.size());
            for (std::size_t k = 0; k < base.candidates.size(); ++k) {
                const auto& a = base.candidates[k];
                const auto& b = other.candidates[k];
                const double tol = 1e-8 * (1 + std::abs(a.event.time) + norm(a.event.position));
                CHECK(std::abs(b.event.time - (a.event.time + dt)) <= tol);
                CHECK(testing::max_abs_diff(b.event.position, apply(q, a.event.position, shift)) <= tol);
                CHECK(a.spurious == b.spurious);
            }
        }
    }
}

TEST_CASE("degenerate-all never occurs on spanning arrays") {
    Rng rng(99);
    std::size_t runs = 0;
    for (std::size_t n : {2u, 3u}) {
        for (int trial = 0; trial < 5000; ++trial) {
            const SensorArray s = testing::random_array(rng, n, n + 1);
            const auto t = arrival_times(s, testing::random_event(rng, n));
            const SolveResult r = solve_rank_deficient(s, t);
            CHECK(r.root_kind != QuadraticRoots::Kind::DegenerateAll);
            ++runs;
        }
    }
    CHECK(runs == 10000);
}
