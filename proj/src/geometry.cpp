#include "mlat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlat/errors.hpp"
#include "mlat/numkernel.hpp"

namespace mlat {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

SensorArray::SensorArray(std::vector<Point> positions) : positions_(std::move(positions)) {
    if (positions_.size() < 2) {
        throw Error(ErrorKind::ValidationError, "a sensor array needs at least two sensors");
    }
    dim_ = positions_.front().size();
    if (dim_ < 2) throw Error(ErrorKind::ValidationError, "sensor dimension must be at least 2");
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        if (positions_[i].size() != dim_) {
            throw Error(ErrorKind::DimensionMismatch,
                        "sensor " + std::to_string(i) + " has dimension " +
                            std::to_string(positions_[i].size()) + ", expected " +
                            std::to_string(dim_));
        }
        for (double v : positions_[i]) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::ValidationError,
                            "sensor " + std::to_string(i) + " has a non-finite coordinate");
            }
        }
    }
    const std::size_t m = positions_.size();
    distances_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = distance(positions_[i], positions_[j]);
            if (d == 0.0) {
                throw Error(ErrorKind::ValidationError, "sensors " + std::to_string(i) + " and " +
                                                            std::to_string(j) + " coincide");
            }
            distances_[i * m + j] = distances_[j * m + i] = d;
            diameter_ = std::max(diameter_, d);
        }
    }
}

Point SensorArray::centroid() const {
    Point c(dim_, 0.0);
    for (const auto& p : positions_)
        for (std::size_t k = 0; k < dim_; ++k) c[k] += p[k];
    for (double& v : c) v /= static_cast<double>(positions_.size());
    return c;
}

bool SensorArray::affinely_spanning(double rel_tol) const {
    const std::size_t m = positions_.size();
    if (m < dim_ + 1) return false;
    std::vector<double> rows;
    rows.reserve((m - 1) * dim_);
    for (std::size_t i = 1; i < m; ++i)
        for (std::size_t k = 0; k < dim_; ++k) rows.push_back(positions_[i][k] - positions_[0][k]);
    return numeric_rank(Matrix(m - 1, dim_, std::move(rows)), rel_tol) == dim_;
}

SensorArray SensorArray::subset(std::span<const std::size_t> indices) const {
    std::vector<Point> pts;
    pts.reserve(indices.size());
    for (std::size_t i : indices) pts.push_back(positions_.at(i));
    return SensorArray(std::move(pts));
}

std::vector<double> arrival_times(const SensorArray& sensors, const EmissionEvent& event) {
    if (event.position.size() != sensors.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "event dimension differs from sensor dimension");
    }
    std::vector<double> t(sensors.size());
    for (std::size_t i = 0; i < sensors.size(); ++i)
        t[i] = event.time + distance(sensors[i], event.position);
    return t;
}

double model_residual(const SensorArray& sensors, std::span<const double> times,
                      const EmissionEvent& event) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const double r = distance(sensors[i], event.position) - (times[i] - event.time);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace mlat
