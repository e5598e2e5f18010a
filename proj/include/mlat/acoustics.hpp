#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mlat/geometry.hpp"
#include "mlat/matching.hpp"

namespace mlat {

/// Unbounded hyperplane {p : normal . p = offset}. The normal is unit length
/// and canonically oriented: its first non-negligible component is positive.
class Wall {
public:
    Wall() = default;
    /// Normalises `normal` (any nonzero length) and canonicalises the sign.
    Wall(Point normal, double offset);

    const Point& normal() const noexcept { return normal_; }
    double offset() const noexcept { return offset_; }
    std::size_t dim() const noexcept { return normal_.size(); }

    double signed_distance(const Point& p) const { return dot(normal_, p) - offset_; }

private:
    Point normal_;
    double offset_ = 0.0;
};

/// Angle between normals (radians) and offset difference; both walls canonical.
double wall_angle(const Wall& a, const Wall& b);
bool same_wall(const Wall& a, const Wall& b, double angle_tol, double offset_tol);

struct Room {
    std::vector<Wall> walls;
    Point loudspeaker;

    /// Throws ValidationError / DimensionMismatch on a malformed room.
    void validate() const;
};

/// Reflection of `source` across `wall`.
Point mirror_point(const Wall& wall, const Point& source);

/// Perpendicular bisector of [source, mirror]; inverse of mirror_point.
Wall wall_from_mirror(const Point& source, const Point& mirror);

/// First-order image sources of a room. All share one emission time.
struct EchoScene {
    std::vector<Point> mirror_points;  // one per wall, in wall order
    double emission_time = 0.0;
};

EchoScene echo_scene(const Room& room, double emission_time);

struct EchoOptions {
    bool include_direct = false;
    /// (wall index, sensor index) pairs whose echo is not received.
    std::vector<std::pair<std::size_t, std::size_t>> dropout;
    /// (sensor index, time) registrations unrelated to the room.
    std::vector<std::pair<std::size_t, double>> spurious;
};

/// Reception times of every first-order echo (and optionally the direct
/// sound) at every sensor, under ray acoustics with speed 1.
ReceptionTable simulate_echoes(const Room& room, const SensorArray& sensors, double emission_time,
                               const EchoOptions& options = {});

struct WallDetection {
    std::vector<Wall> walls;
    /// Event located at the loudspeaker (the direct sound), if matched.
    std::optional<DetectedEvent> direct;
    MatchReport match;
};

/// Matches the echoes and turns every detected image source into a wall.
WallDetection detect_walls(const SensorArray& sensors, const ReceptionTable& table,
                           const Point& source, const MatchConfig& config = {});

struct GoodnessConfig {
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    /// Standard deviation of the per-coordinate sensor jitter, as a fraction
    /// of the sensor diameter.
    double perturbation = 0.05;
    /// Walls count as recovered within these tolerances.
    double angle_tol = 1e-6;
    double offset_tol_rel = 1e-6;
    /// Margins at or below this are flagged; genuine tuples sit near 1e-15.
    double collapse_threshold = 1e-12;
    MatchConfig match;
};

struct GoodnessReport {
    std::size_t configurations = 0;  // base array plus perturbed trials
    std::size_t ghost_walls_found = 0;
    std::size_t configurations_with_ghosts = 0;
    std::size_t missed_walls = 0;
    std::size_t skipped_configurations = 0;  // perturbed arrays that were degenerate
    /// Smallest relation residual over tuples mixing different image sources,
    /// over all configurations. Unset when the room has a single wall.
    std::optional<double> max_offdiagonal_residual_margin;
    /// Margin at or below collapse_threshold: some mixed tuple is numerically
    /// indistinguishable from a genuine one.
    bool margin_collapsed = false;
};

/// Empirical "good position" check: runs the detector on the given array and
/// on `trials` randomly jittered copies, counting ghost walls, and records the
/// residual margin separating mixed tuples from genuine ones.
GoodnessReport goodness_check(const Room& room, const SensorArray& sensors,
                              const GoodnessConfig& config = {});

/// Smallest relation residual over tuples (s_1..s_m) of image sources that are
/// not all equal and whose times pass the pairwise bound
/// |t_i - t_j| <= d_ij + slack, i.e. the tuples the matching sweep would test.
/// Tuples far outside that bound are excluded: there D is dominated by the
/// rank-3 matrix (t_i - t_j)^2 and the residual decays for reasons unrelated
/// to geometry. Unset for fewer than two image sources.
std::optional<double> mixed_tuple_margin(const EchoScene& scene, const SensorArray& sensors,
                                         double slack);

}  // namespace mlat
