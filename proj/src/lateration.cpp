#include "mlat/lateration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mlat/errors.hpp"

namespace mlat {

namespace {

void check_lengths(const SensorArray& sensors, std::span<const double> times) {
    if (times.size() != sensors.size()) {
        throw Error(ErrorKind::LengthMismatch, std::to_string(times.size()) + " times for " +
                                                   std::to_string(sensors.size()) + " sensors");
    }
    for (double t : times) {
        if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "reception times must be finite");
    }
}

double time_spread(std::span<const double> times) {
    const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
    return *hi - *lo;
}

// The solver runs on centred, unit-scale data: p_i = (a_i - origin) / scale,
// tau_i = (t_i - time_origin) / scale. Ranks and the solution set of the
// absolute-value model are invariant under this change of frame.
struct Frame {
    Point origin;
    double time_origin = 0.0;
    double scale = 1.0;
    std::vector<Point> positions;
    std::vector<double> times;

    Frame(const SensorArray& sensors, std::span<const double> t) {
        origin = sensors.centroid();
        time_origin = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
        scale = sensors.diameter() + time_spread(t);
        positions.reserve(sensors.size());
        for (std::size_t i = 0; i < sensors.size(); ++i) {
            Point p(sensors.dim());
            for (std::size_t k = 0; k < p.size(); ++k) p[k] = (sensors[i][k] - origin[k]) / scale;
            positions.push_back(std::move(p));
            times.push_back((t[i] - time_origin) / scale);
        }
    }

    EmissionEvent to_caller(double tau, std::span<const double> xi) const {
        EmissionEvent e;
        e.time = time_origin + scale * tau;
        e.position.resize(origin.size());
        for (std::size_t k = 0; k < origin.size(); ++k) e.position[k] = origin[k] + scale * xi[k];
        return e;
    }
};

Matrix a_matrix(const std::vector<Point>& positions, std::span<const double> times) {
    const std::size_t m = positions.size();
    const std::size_t n = positions.front().size();
    std::vector<double> d;
    d.reserve(m * (n + 2));
    for (std::size_t i = 0; i < m; ++i) {
        d.push_back(-2.0 * times[i]);
        for (std::size_t k = 0; k < n; ++k) d.push_back(2.0 * positions[i][k]);
        d.push_back(-1.0);
    }
    return Matrix(m, n + 2, std::move(d));
}

Matrix a_tilde_matrix(const std::vector<Point>& positions) {
    const std::size_t m = positions.size();
    const std::size_t n = positions.front().size();
    std::vector<double> d;
    d.reserve(m * (n + 1));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < n; ++k) d.push_back(2.0 * positions[i][k]);
        d.push_back(-1.0);
    }
    return Matrix(m, n + 1, std::move(d));
}

// ||a_i||^2 - t_i^2
std::vector<double> model_rhs(const std::vector<Point>& positions, std::span<const double> times) {
    std::vector<double> r(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        r[i] = dot(positions[i], positions[i]) - times[i] * times[i];
    return r;
}

bool is_spurious(std::span<const double> times, double t, double tol) {
    return std::any_of(times.begin(), times.end(), [&](double ti) { return ti < t - tol; });
}

double resolve_time_tol(const SolveConfig& config, const SensorArray& sensors,
                        std::span<const double> times) {
    return config.time_tol ? *config.time_tol : default_time_tol(sensors, times);
}

}  // namespace

Matrix build_a(const SensorArray& sensors, std::span<const double> times) {
    check_lengths(sensors, times);
    return a_matrix(sensors.positions(), times);
}

double default_time_tol(const SensorArray& sensors, std::span<const double> times) {
    return 1e-9 * (time_spread(times) + sensors.diameter());
}

EmissionEvent solve_full_rank(const SensorArray& sensors, std::span<const double> times,
                              double rank_tol) {
    check_lengths(sensors, times);
    const std::size_t n = sensors.dim();
    if (sensors.size() < n + 2) {
        throw Error(ErrorKind::RankDeficient, "full-rank path needs at least n+2 sensors");
    }
    const Frame frame(sensors, times);
    const Matrix a = a_matrix(frame.positions, frame.times);
    const auto sol = least_squares_solve(a, model_rhs(frame.positions, frame.times), rank_tol);
    return frame.to_caller(sol[0], std::span<const double>(sol).subspan(1, n));
}

SolveResult solve_rank_deficient(const SensorArray& sensors, std::span<const double> times,
                                 const SolveConfig& config) {
    check_lengths(sensors, times);
    const std::size_t n = sensors.dim();
    const std::size_t m = sensors.size();
    if (m < n + 1 || !sensors.affinely_spanning(config.rank_tol)) {
        throw Error(ErrorKind::NotSpanning, "sensors do not affinely span R^" + std::to_string(n));
    }
    const Frame frame(sensors, times);
    const Matrix a_tilde = a_tilde_matrix(frame.positions);

    std::vector<double> twice_times(frame.times);
    for (double& v : twice_times) v *= 2.0;
    const auto u_alpha = least_squares_solve(a_tilde, twice_times, config.rank_tol);
    const auto v_beta = least_squares_solve(a_tilde, model_rhs(frame.positions, frame.times),
                                            config.rank_tol);
    const std::span<const double> u(u_alpha.data(), n);
    const std::span<const double> v(v_beta.data(), n);
    const double alpha = u_alpha[n];
    const double beta = v_beta[n];

    const double qa = dot(u, u) - 1.0;
    const double qb = 2.0 * dot(u, v) - alpha;
    const double qc = dot(v, v) - beta;
    const QuadraticRoots roots = solve_quadratic(qa, qb, qc, config.quad_tol);

    SolveResult result;
    result.path = SolvePath::Quadratic;
    result.rank_of_a = numeric_rank(a_matrix(frame.positions, frame.times), config.rank_tol);
    result.root_kind = roots.kind;
    result.direction = Point(u.begin(), u.end());
    {
        // a (t-s)^2 + b L (t-s) + c L^2 expanded around the caller's time origin
        const double s = frame.time_origin;
        const double bl = qb * frame.scale;
        const double cl = qc * frame.scale * frame.scale;
        result.quadratic = QuadraticCoefficients{qa, bl - 2.0 * qa * s, qa * s * s - bl * s + cl};
    }

    if (roots.kind == QuadraticRoots::Kind::DegenerateAll) {
        throw Error(ErrorKind::TheoremViolation,
                    "both leading coefficients of the reduced quadratic vanish");
    }
    if (roots.kind == QuadraticRoots::Kind::NoReal) {
        throw Error(ErrorKind::TheoremViolation,
                    "reduced quadratic has no real root; times are inconsistent with one emission");
    }

    const double tol = resolve_time_tol(config, sensors, times);
    Point xi(n);
    for (double tau : roots.roots) {
        for (std::size_t k = 0; k < n; ++k) xi[k] = tau * u[k] + v[k];
        Candidate c{frame.to_caller(tau, xi), false};
        c.spurious = is_spurious(times, c.event.time, tol);
        result.candidates.push_back(std::move(c));
    }
    return result;
}

SolveResult solve(const SensorArray& sensors, std::span<const double> times,
                  const SolveConfig& config) {
    check_lengths(sensors, times);
    const std::size_t n = sensors.dim();
    if (sensors.size() < n + 1) {
        throw Error(ErrorKind::NotSpanning, "need at least n+1 sensors");
    }
    if (sensors.size() >= n + 2) {
        const Frame frame(sensors, times);
        const std::size_t rank = numeric_rank(a_matrix(frame.positions, frame.times), config.rank_tol);
        if (rank == n + 2) {
            SolveResult result;
            result.path = SolvePath::FullRank;
            result.rank_of_a = rank;
            Candidate c{solve_full_rank(sensors, times, config.rank_tol), false};
            c.spurious = is_spurious(times, c.event.time, resolve_time_tol(config, sensors, times));
            result.candidates.push_back(std::move(c));
            return result;
        }
    }
    return solve_rank_deficient(sensors, times, config);
}

GeometryReport check_geometry(const SensorArray& sensors, double det_tol, double rank_tol) {
    const std::size_t n = sensors.dim();
    const std::size_t m = sensors.size();
    GeometryReport report;
    report.noncoplanar = sensors.affinely_spanning(rank_tol);

    if (m >= n + 1) {
        // Enumerate (n+1)-subsets in lexicographic order.
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            if (!sensors.subset(idx).affinely_spanning(rank_tol)) report.degenerate_subsets.push_back(idx);
            std::size_t k = n + 1;
            while (k > 0 && idx[k - 1] == m - (n + 1) + (k - 1)) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t j = k; j < n + 1; ++j) idx[j] = idx[j - 1] + 1;
        }
    }

    if (m != n + 2) return report;
    report.condition_applicable = true;

    const std::size_t k = n + 2;
    std::vector<double> lengths(m);
    for (std::size_t i = 0; i < m; ++i) lengths[i] = norm(sensors[i]);
    std::vector<double> scratch(k * k);
    for (std::size_t mask = 0; mask < (std::size_t{1} << (m - 1)); ++mask) {
        std::vector<int> eps(m, 1);
        for (std::size_t i = 1; i < m; ++i) eps[i] = (mask >> (i - 1)) & 1U ? -1 : 1;
        double row_norms = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            double* row = scratch.data() + i * k;
            row[0] = eps[i] * lengths[i];
            for (std::size_t c = 0; c < n; ++c) row[1 + c] = sensors[i][c];
            row[k - 1] = 1.0;
            row_norms *= std::sqrt(std::inner_product(row, row + k, row, 0.0));
        }
        const double det = determinant_in_place(scratch, k);
        if (std::abs(det) <= det_tol * row_norms) report.failing_sign_patterns.push_back(eps);
    }
    report.condition_ok = report.failing_sign_patterns.empty();
    return report;
}

}  // namespace mlat
