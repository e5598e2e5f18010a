#include "mlat/numkernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mlat/errors.hpp"

namespace mlat {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::NotSpanning: return "NotSpanning";
        case ErrorKind::TheoremViolation: return "TheoremViolation";
        case ErrorKind::DegenerateMirror: return "DegenerateMirror";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

namespace {

using EigenRowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMajor> as_eigen(const Matrix& a) {
    return {a.entries().data(), static_cast<Eigen::Index>(a.rows()),
            static_cast<Eigen::Index>(a.cols())};
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorKind::LengthMismatch,
                    "matrix " + std::to_string(rows_) + "x" + std::to_string(cols_) + " given " +
                        std::to_string(data_.size()) + " entries");
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorKind::InvalidArgument, "matrix entries must be finite");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(ErrorKind::LengthMismatch, "ragged matrix rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    *this = Matrix(rows_, cols_, std::move(data_));
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) {
    return Matrix(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Matrix Matrix::identity(std::size_t k) {
    std::vector<double> d(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) d[i * k + i] = 1.0;
    return Matrix(k, k, std::move(d));
}

Matrix Matrix::transposed() const {
    std::vector<double> d(data_.size());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) d[c * rows_ + r] = data_[r * cols_ + c];
    return Matrix(cols_, rows_, std::move(d));
}

Matrix Matrix::scaled(double factor) const {
    std::vector<double> d(data_);
    for (double& v : d) v *= factor;
    return Matrix(rows_, cols_, std::move(d));
}

Matrix Matrix::submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const {
    std::vector<double> d;
    d.reserve(rows.size() * cols.size());
    for (std::size_t r : rows)
        for (std::size_t c : cols) d.push_back((*this)(r, c));
    return Matrix(rows.size(), cols.size(), std::move(d));
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) throw Error(ErrorKind::LengthMismatch, "matrix-vector size mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

std::vector<double> singular_values(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return {};
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_eigen(a));
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

std::size_t numeric_rank(const Matrix& a, double rel_tol) {
    const auto sv = singular_values(a);
    if (sv.empty() || sv.front() == 0.0) return 0;
    const double cut = rel_tol * sv.front();
    return static_cast<std::size_t>(
        std::count_if(sv.begin(), sv.end(), [cut](double s) { return s > cut; }));
}

std::vector<double> least_squares_solve(const Matrix& a, std::span<const double> b, double rel_tol) {
    if (b.size() != a.rows()) {
        throw Error(ErrorKind::LengthMismatch, "right-hand side has " + std::to_string(b.size()) +
                                                   " entries, matrix has " +
                                                   std::to_string(a.rows()) + " rows");
    }
    if (a.rows() < a.cols()) {
        throw Error(ErrorKind::RankDeficient, "fewer rows than unknowns");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_eigen(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0 || s(s.size() - 1) <= rel_tol * s(0)) {
        throw Error(ErrorKind::RankDeficient, "column rank below " + std::to_string(a.cols()));
    }
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x = svd.solve(rhs);
    return {x.data(), x.data() + x.size()};
}

double determinant_in_place(std::span<double> m, std::size_t k) noexcept {
    double det = 1.0;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        double best = std::abs(m[col * k + col]);
        for (std::size_t r = col + 1; r < k; ++r) {
            const double v = std::abs(m[r * k + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != col) {
            for (std::size_t c = col; c < k; ++c) std::swap(m[col * k + c], m[pivot * k + c]);
            det = -det;
        }
        const double p = m[col * k + col];
        det *= p;
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = m[r * k + col] / p;
            if (f == 0.0) continue;
            for (std::size_t c = col + 1; c < k; ++c) m[r * k + c] -= f * m[col * k + c];
        }
    }
    return det;
}

double determinant(const Matrix& a) {
    if (!a.square()) throw Error(ErrorKind::DimensionMismatch, "determinant of a non-square matrix");
    if (a.rows() > 8) throw Error(ErrorKind::InvalidArgument, "determinant limited to k <= 8");
    std::array<double, 64> scratch{};
    std::copy(a.entries().begin(), a.entries().end(), scratch.begin());
    return determinant_in_place(std::span<double>(scratch.data(), a.rows() * a.rows()), a.rows());
}

QuadraticRoots solve_quadratic(double a, double b, double c, double tol) {
    using Kind = QuadraticRoots::Kind;
    if (std::abs(a) <= tol) {
        if (std::abs(b) <= tol) return {Kind::DegenerateAll, {}};
        return {Kind::DegenerateLinear, {-c / b}};
    }
    const double disc = b * b - 4.0 * a * c;
    // A double root computed from rounded coefficients has a discriminant of
    // either sign near zero; the band is relative to the coefficient scale.
    const double band = tol * std::max({a * a, b * b, std::abs(a * c)});
    if (disc < -band) return {Kind::NoReal, {}};
    if (disc <= band) return {Kind::OneReal, {-b / (2.0 * a)}};
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double r1 = q / a;
    double r2 = c / q;
    if (r1 > r2) std::swap(r1, r2);
    return {Kind::TwoReal, {r1, r2}};
}

}  // namespace mlat
