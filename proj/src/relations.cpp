#include "mlat/relations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "mlat/errors.hpp"

namespace mlat {

namespace {

constexpr std::size_t kMaxRelationSize = 8;

// Hadamard-normalised |det| of the k x k principal submatrix of `full`
// (stride `m`) selected by `idx`.
double normalized_principal_det(const double* full, std::size_t m,
                                std::span<const std::size_t> idx) {
    const std::size_t k = idx.size();
    std::array<double, kMaxRelationSize * kMaxRelationSize> buf{};
    double row_norms = 1.0;
    for (std::size_t r = 0; r < k; ++r) {
        double sq = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double v = full[idx[r] * m + idx[c]];
            buf[r * k + c] = v;
            sq += v * v;
        }
        row_norms *= std::sqrt(sq);
    }
    const double det = std::abs(determinant_in_place(std::span<double>(buf.data(), k * k), k));
    if (row_norms == 0.0) return 0.0;
    return std::min(1.0, det / row_norms);
}

double residual_of_entries(const double* full, std::size_t m, std::size_t dim) {
    const std::size_t k = dim + 2;
    if (m < k) return 0.0;
    std::array<std::size_t, kMaxRelationSize> idx{};
    std::iota(idx.begin(), idx.begin() + k, std::size_t{0});
    double worst = 0.0;
    while (true) {
        worst = std::max(worst, normalized_principal_det(full, m, std::span(idx.data(), k)));
        std::size_t p = k;
        while (p > 0 && idx[p - 1] == m - k + (p - 1)) --p;
        if (p == 0) break;
        ++idx[p - 1];
        for (std::size_t j = p; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return worst;
}

void check_times(const SensorArray& sensors, std::span<const double> times) {
    if (times.size() != sensors.size()) {
        throw Error(ErrorKind::LengthMismatch, std::to_string(times.size()) + " times for " +
                                                   std::to_string(sensors.size()) + " sensors");
    }
}

}  // namespace

RelationMatrix build_d(const SensorArray& sensors, std::span<const double> times) {
    check_times(sensors, times);
    const std::size_t m = sensors.size();
    std::vector<double> d(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double dt = times[i] - times[j];
            const double dij = sensors.pair_distance(i, j);
            d[i * m + j] = d[j * m + i] = dt * dt - dij * dij;
        }
    }
    return {Matrix(m, m, std::move(d)), sensors.dim()};
}

double relation_residual(const RelationMatrix& d) {
    if (d.size() > kMaxRelationSize) {
        throw Error(ErrorKind::InvalidArgument, "relation residual limited to m <= 8");
    }
    return residual_of_entries(d.d.entries().data(), d.size(), d.dim);
}

double relation_residual(const SensorArray& sensors, std::span<const double> times) {
    check_times(sensors, times);
    const std::size_t m = sensors.size();
    if (m > kMaxRelationSize) {
        throw Error(ErrorKind::InvalidArgument, "relation residual limited to m <= 8");
    }
    std::array<double, kMaxRelationSize * kMaxRelationSize> full{};
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double dt = times[i] - times[j];
            const double dij = sensors.pair_distance(i, j);
            full[i * m + j] = full[j * m + i] = dt * dt - dij * dij;
        }
    }
    return residual_of_entries(full.data(), m, sensors.dim());
}

double QuadraticForm::operator()(std::span<const double> v) const {
    if (v.size() != size_) {
        throw Error(ErrorKind::DimensionMismatch, "vector of size " + std::to_string(v.size()) +
                                                      " for a form on size " + std::to_string(size_));
    }
    if (kind_ == Kind::Euclidean) return dot(v, v);
    const auto space = v.subspan(1);
    return v[0] * v[0] - dot(space, space);
}

Matrix cayley_menger(const std::vector<Point>& points, const QuadraticForm& form) {
    const std::size_t count = points.size();
    if (count == 0) throw Error(ErrorKind::InvalidArgument, "no points");
    for (std::size_t i = 0; i < count; ++i) {
        if (points[i].size() != form.vector_size()) {
            throw Error(ErrorKind::DimensionMismatch,
                        "point " + std::to_string(i) + " does not live in the form's space");
        }
    }
    const std::size_t k = count + 1;
    std::vector<double> c(k * k, 0.0);
    for (std::size_t j = 1; j < k; ++j) c[j] = c[j * k] = 1.0;
    Point diff(form.vector_size());
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = points[i][r] - points[j][r];
            const double q = form(diff);
            c[(i + 1) * k + (j + 1)] = c[(j + 1) * k + (i + 1)] = q;
        }
    }
    return Matrix(k, k, std::move(c));
}

}  // namespace mlat
