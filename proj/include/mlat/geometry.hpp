#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mlat {

/// A point or vector in R^n; the dimension is a runtime quantity.
using Point = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Sensor positions a_1..a_m in R^n, n >= 2. Positions are finite, share the
/// dimension and are pairwise distinct. Lower bounds on m that depend on the
/// operation (n+1 to solve, n+2 to match) are checked where they apply.
class SensorArray {
public:
    explicit SensorArray(std::vector<Point> positions);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return positions_.size(); }
    const Point& operator[](std::size_t i) const noexcept { return positions_[i]; }
    const std::vector<Point>& positions() const noexcept { return positions_; }

    /// d(i, j) = ||a_i - a_j||, precomputed.
    double pair_distance(std::size_t i, std::size_t j) const noexcept {
        return distances_[i * positions_.size() + j];
    }
    double diameter() const noexcept { return diameter_; }
    Point centroid() const;

    /// Affine span has full dimension n, i.e. the sensors are not contained in
    /// a common hyperplane.
    bool affinely_spanning(double rel_tol) const;

    SensorArray subset(std::span<const std::size_t> indices) const;

private:
    std::size_t dim_ = 0;
    std::vector<Point> positions_;
    std::vector<double> distances_;
    double diameter_ = 0.0;
};

/// Emission at `time` from `position`, in speed-1 units.
struct EmissionEvent {
    double time = 0.0;
    Point position;
};

/// Reception times of a single event under the speed-1 model.
std::vector<double> arrival_times(const SensorArray& sensors, const EmissionEvent& event);

/// Largest | ||a_i - x|| - (t_i - t) | over all sensors.
double model_residual(const SensorArray& sensors, std::span<const double> times,
                      const EmissionEvent& event);

}  // namespace mlat
