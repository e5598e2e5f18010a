// Shared helpers for the unit and acceptance tests: seeded scene generators
// and an exact rational-arithmetic oracle built on GMP.
#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mlat/acoustics.hpp"
#include "mlat/geometry.hpp"
#include "mlat/numkernel.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline mlat::Point random_point(Rng& rng, std::size_t n, double half_width) {
    mlat::Point p(n);
    for (double& v : p) v = uniform(rng, -half_width, half_width);
    return p;
}

inline mlat::Point random_unit(Rng& rng, std::size_t n) {
    mlat::Point p(n);
    for (double& v : p) v = gaussian(rng);
    const double l = mlat::norm(p);
    for (double& v : p) v /= l;
    return p;
}

/// m sensors uniform in [-1, 1]^n; redrawn until the array affinely spans.
inline mlat::SensorArray random_array(Rng& rng, std::size_t n, std::size_t m) {
    while (true) {
        std::vector<mlat::Point> pos;
        for (std::size_t i = 0; i < m; ++i) pos.push_back(random_point(rng, n, 1.0));
        mlat::SensorArray s(pos);
        if (s.affinely_spanning(1e-3)) return s;
    }
}

inline mlat::EmissionEvent random_event(Rng& rng, std::size_t n, double reach = 3.0) {
    return {uniform(rng, -1.0, 1.0), random_point(rng, n, reach)};
}

/// Random convex-ish room: every wall faces the loudspeaker at distance 2..5.
inline mlat::Room random_room(Rng& rng, std::size_t n, std::size_t walls) {
    mlat::Room room;
    room.loudspeaker = random_point(rng, n, 1.0);
    for (std::size_t w = 0; w < walls; ++w) {
        mlat::Point normal = random_unit(rng, n);
        const double d = uniform(rng, 2.0, 5.0);
        room.walls.emplace_back(normal, mlat::dot(normal, room.loudspeaker) + d);
    }
    return room;
}

/// Relative error against a reference value, |x - ref| / max(1, |ref|).
inline double rel_err(double x, double ref) { return std::abs(x - ref) / std::max(1.0, std::abs(ref)); }

inline double max_abs_diff(const mlat::Point& a, const mlat::Point& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

// ---- exact oracle ---------------------------------------------------------

using QMatrix = std::vector<std::vector<mpq_class>>;

/// Every double is a dyadic rational, so the conversion is exact.
inline QMatrix to_rational(const mlat::Matrix& a) {
    QMatrix q(a.rows(), std::vector<mpq_class>(a.cols()));
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) q[r][c] = mpq_class(a(r, c));
    return q;
}

/// Gaussian elimination over Q; returns the rank and leaves `q` in echelon form.
inline std::size_t exact_rank(QMatrix q) {
    const std::size_t rows = q.size();
    const std::size_t cols = rows ? q[0].size() : 0;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t p = rank;
        while (p < rows && q[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(q[p], q[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            if (q[r][c] == 0) continue;
            const mpq_class f = q[r][c] / q[rank][c];
            for (std::size_t k = c; k < cols; ++k) q[r][k] -= f * q[rank][k];
        }
        ++rank;
    }
    return rank;
}

inline mpq_class exact_determinant(QMatrix q) {
    const std::size_t k = q.size();
    mpq_class det = 1;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t p = c;
        while (p < k && q[p][c] == 0) ++p;
        if (p == k) return 0;
        if (p != c) {
            std::swap(q[p], q[c]);
            det = -det;
        }
        det *= q[c][c];
        for (std::size_t r = c + 1; r < k; ++r) {
            if (q[r][c] == 0) continue;
            const mpq_class f = q[r][c] / q[c][c];
            for (std::size_t j = c; j < k; ++j) q[r][j] -= f * q[c][j];
        }
    }
    return det;
}

inline mlat::Matrix random_integer_matrix(Rng& rng, std::size_t rows, std::size_t cols, int range) {
    std::uniform_int_distribution<int> d(-range, range);
    std::vector<double> e(rows * cols);
    for (double& v : e) v = d(rng);
    return mlat::Matrix(rows, cols, std::move(e));
}

}  // namespace testing
