#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mlat/geometry.hpp"
#include "mlat/numkernel.hpp"

namespace mlat {

enum class SolvePath { FullRank, Quadratic };

struct SolveConfig {
    double rank_tol = kDefaultRankTol;
    /// Causality guard band; unset means 1e-9 * (time spread + sensor diameter).
    std::optional<double> time_tol;
    /// Vanishing threshold for the normalised quadratic coefficients.
    double quad_tol = 1e-9;
};

struct Candidate {
    EmissionEvent event;
    bool spurious = false;
};

/// Coefficients of a t^2 + b t + c = 0 in the caller's time frame.
struct QuadraticCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct SolveResult {
    SolvePath path = SolvePath::FullRank;
    std::vector<Candidate> candidates;  // ascending by time
    std::size_t rank_of_a = 0;
    std::optional<QuadraticCoefficients> quadratic;
    std::optional<QuadraticRoots::Kind> root_kind;
    /// Line x = t u + v the candidates lie on (quadratic path only).
    std::optional<Point> direction;
};

/// Rows (-2 t_i, 2 a_i^T, -1); an m x (n+2) matrix.
Matrix build_a(const SensorArray& sensors, std::span<const double> times);

/// Causality tolerance used when SolveConfig::time_tol is unset.
double default_time_tol(const SensorArray& sensors, std::span<const double> times);

/// Unique solution when A has full column rank n+2. Throws RankDeficient otherwise.
EmissionEvent solve_full_rank(const SensorArray& sensors, std::span<const double> times,
                              double rank_tol = kDefaultRankTol);

/// Reduction to x = t u + v and a quadratic in t. Works whenever the sensors
/// affinely span R^n (m >= n+1). Both roots are returned, spurious ones flagged.
SolveResult solve_rank_deficient(const SensorArray& sensors, std::span<const double> times,
                                 const SolveConfig& config = {});

/// Dispatches on the numeric rank of A.
SolveResult solve(const SensorArray& sensors, std::span<const double> times,
                  const SolveConfig& config = {});

struct GeometryReport {
    bool noncoplanar = false;
    /// The sign-pattern determinant condition is only defined for m == n+2.
    bool condition_applicable = false;
    bool condition_ok = false;
    /// Failing patterns with the first sign fixed to +1 (the negated pattern fails too).
    std::vector<std::vector<int>> failing_sign_patterns;
    /// (n+1)-subsets of sensors lying in a common hyperplane.
    std::vector<std::vector<std::size_t>> degenerate_subsets;
};

/// Geometry diagnostics. `det_tol` bounds the Hadamard-normalised determinant
/// |det M| / prod ||row_i||, M having rows (e_i ||a_i||, a_i^T, 1).
GeometryReport check_geometry(const SensorArray& sensors, double det_tol = kDefaultRankTol,
                              double rank_tol = kDefaultRankTol);

}  // namespace mlat
