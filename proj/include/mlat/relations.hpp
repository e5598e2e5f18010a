#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlat/geometry.hpp"
#include "mlat/numkernel.hpp"

namespace mlat {

/// D_ij = (t_i - t_j)^2 - ||a_i - a_j||^2 for reception times of m sensors in
/// R^dim. For times of a single emission event rank(D) <= dim + 1.
struct RelationMatrix {
    Matrix d;
    std::size_t dim = 0;

    std::size_t size() const noexcept { return d.rows(); }
};

RelationMatrix build_d(const SensorArray& sensors, std::span<const double> times);

/// Unit-free surrogate for det(D) = 0: |det D| / prod_i ||row_i(D)||, in [0, 1],
/// with 0/0 taken as 0. For m > dim+2 the maximum over all (dim+2)-subsets of
/// sensors is returned; for m < dim+2 there is no relation and the result is 0.
double relation_residual(const RelationMatrix& d);

/// Same value computed straight from sensors and times without allocating a
/// Matrix (m <= 8). This is the per-tuple test of the matching sweep.
double relation_residual(const SensorArray& sensors, std::span<const double> times);

/// Quadratic form on the space of the Cayley-Menger points.
class QuadraticForm {
public:
    enum class Kind { Euclidean, Minkowski };

    /// ||v||^2 on R^n.
    static QuadraticForm euclidean(std::size_t n) { return {Kind::Euclidean, n}; }
    /// t^2 - ||u||^2 on vectors (t, u) with u in R^n; vectors have n+1 entries.
    static QuadraticForm minkowski(std::size_t spatial_dim) { return {Kind::Minkowski, spatial_dim + 1}; }

    Kind kind() const noexcept { return kind_; }
    std::size_t vector_size() const noexcept { return size_; }
    double operator()(std::span<const double> v) const;

private:
    QuadraticForm(Kind k, std::size_t size) : kind_(k), size_(size) {}
    Kind kind_;
    std::size_t size_;
};

/// Bordered matrix with C_00 = 0, C_0j = C_j0 = 1 and C_{i+1,j+1} = q(v_i - v_j)
/// for points v_0..v_m; size (m+2) x (m+2). rank(C) = r + 2 with r the rank
/// of q on span{v_i - v_0}.
Matrix cayley_menger(const std::vector<Point>& points, const QuadraticForm& form);

}  // namespace mlat
