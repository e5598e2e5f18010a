#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mlat {

/// Relative singular-value threshold used for every rank decision.
inline constexpr double kDefaultRankTol = 1e-8;

/// Dense row-major matrix of finite doubles. Immutable once built; assemble
/// entries in a plain vector and hand them over.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols);
    static Matrix identity(std::size_t k);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<const double> entries() const noexcept { return data_; }

    Matrix transposed() const;
    Matrix scaled(double factor) const;
    /// Keep only the listed rows and columns, in the given order.
    Matrix submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> multiply(const Matrix& a, std::span<const double> x);

/// Singular values in descending order.
std::vector<double> singular_values(const Matrix& a);

/// Number of singular values above rel_tol * sigma_max; zero for the zero matrix.
std::size_t numeric_rank(const Matrix& a, double rel_tol = kDefaultRankTol);

/// Minimiser of ||a x - b||. Throws RankDeficient when a has column rank
/// below a.cols() at rel_tol, LengthMismatch when b has the wrong length.
std::vector<double> least_squares_solve(const Matrix& a, std::span<const double> b,
                                        double rel_tol = kDefaultRankTol);

/// Determinant by partially pivoted elimination (k <= 8).
double determinant(const Matrix& a);

/// Same, on a scratch buffer holding a k x k row-major matrix. The buffer is
/// overwritten. Used in the tuple sweep where allocation would dominate.
double determinant_in_place(std::span<double> scratch, std::size_t k) noexcept;

struct QuadraticRoots {
    enum class Kind { TwoReal, OneReal, NoReal, DegenerateLinear, DegenerateAll };

    Kind kind = Kind::NoReal;
    std::vector<double> roots;  // ascending
};

/// Real roots of a r^2 + b r + c = 0. Coefficients at or below tol in
/// magnitude are treated as vanishing; a near-zero discriminant is a double root.
QuadraticRoots solve_quadratic(double a, double b, double c, double tol);

}  // namespace mlat
