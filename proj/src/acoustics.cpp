#include "mlat/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mlat/errors.hpp"
#include "mlat/relations.hpp"

namespace mlat {

namespace {

constexpr double kOrientationTol = 1e-9;

// Angle between unit vectors, accurate near zero.
double unit_angle(const Point& a, const Point& b) {
    return 2.0 * std::asin(std::min(1.0, distance(a, b) / 2.0));
}

Point negated(Point p) {
    for (double& v : p) v = -v;
    return p;
}

}  // namespace

Wall::Wall(Point normal, double offset) : normal_(std::move(normal)), offset_(offset) {
    const double len = norm(normal_);
    if (!(len > 0.0) || !std::isfinite(len) || !std::isfinite(offset_)) {
        throw Error(ErrorKind::ValidationError, "wall normal must be finite and nonzero");
    }
    for (double& v : normal_) v /= len;
    offset_ /= len;
    const auto lead = std::find_if(normal_.begin(), normal_.end(),
                                   [](double v) { return std::abs(v) > kOrientationTol; });
    if (lead != normal_.end() && *lead < 0.0) {
        normal_ = negated(std::move(normal_));
        offset_ = -offset_;
    }
}

double wall_angle(const Wall& a, const Wall& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "walls of different dimension");
    return std::min(unit_angle(a.normal(), b.normal()), unit_angle(a.normal(), negated(b.normal())));
}

bool same_wall(const Wall& a, const Wall& b, double angle_tol, double offset_tol) {
    if (a.dim() != b.dim()) return false;
    // Compare in both orientations so near-threshold canonicalisation cannot matter.
    const bool aligned = unit_angle(a.normal(), b.normal()) <= angle_tol &&
                         std::abs(a.offset() - b.offset()) <= offset_tol;
    const bool flipped = unit_angle(a.normal(), negated(b.normal())) <= angle_tol &&
                         std::abs(a.offset() + b.offset()) <= offset_tol;
    return aligned || flipped;
}

void Room::validate() const {
    const std::size_t n = loudspeaker.size();
    if (n < 2) throw Error(ErrorKind::ValidationError, "loudspeaker dimension must be at least 2");
    for (double v : loudspeaker) {
        if (!std::isfinite(v)) throw Error(ErrorKind::ValidationError, "loudspeaker coordinate not finite");
    }
    for (std::size_t w = 0; w < walls.size(); ++w) {
        if (walls[w].dim() != n) {
            throw Error(ErrorKind::DimensionMismatch,
                        "wall " + std::to_string(w) + " has dimension " +
                            std::to_string(walls[w].dim()) + ", loudspeaker " + std::to_string(n));
        }
        if (std::abs(walls[w].signed_distance(loudspeaker)) <= 1e-9) {
            throw Error(ErrorKind::ValidationError,
                        "loudspeaker lies on wall " + std::to_string(w));
        }
    }
}

Point mirror_point(const Wall& wall, const Point& source) {
    if (source.size() != wall.dim()) throw Error(ErrorKind::DimensionMismatch, "point and wall dimension differ");
    const double s = 2.0 * wall.signed_distance(source);
    Point m(source);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] -= s * wall.normal()[k];
    return m;
}

Wall wall_from_mirror(const Point& source, const Point& mirror) {
    if (source.size() != mirror.size()) throw Error(ErrorKind::DimensionMismatch, "point dimensions differ");
    if (distance(source, mirror) <= 1e-9) {
        throw Error(ErrorKind::DegenerateMirror, "mirror point coincides with the source");
    }
    Point normal(source.size());
    Point mid(source.size());
    for (std::size_t k = 0; k < source.size(); ++k) {
        normal[k] = mirror[k] - source[k];
        mid[k] = 0.5 * (mirror[k] + source[k]);
    }
    const double len = norm(normal);
    for (double& v : normal) v /= len;
    const double offset = dot(normal, mid);
    return Wall(std::move(normal), offset);
}

EchoScene echo_scene(const Room& room, double emission_time) {
    room.validate();
    EchoScene scene;
    scene.emission_time = emission_time;
    for (const auto& w : room.walls) scene.mirror_points.push_back(mirror_point(w, room.loudspeaker));
    return scene;
}

ReceptionTable simulate_echoes(const Room& room, const SensorArray& sensors, double emission_time,
                               const EchoOptions& options) {
    if (sensors.dim() != room.loudspeaker.size()) {
        throw Error(ErrorKind::DimensionMismatch, "sensors and room differ in dimension");
    }
    const EchoScene scene = echo_scene(room, emission_time);
    const std::size_t m = sensors.size();
    std::vector<char> dropped(room.walls.size() * m, 0);
    for (const auto& [wall, sensor] : options.dropout) {
        if (wall >= room.walls.size() || sensor >= m) {
            throw Error(ErrorKind::ValidationError, "dropout entry (" + std::to_string(wall) + ", " +
                                                        std::to_string(sensor) + ") out of range");
        }
        dropped[wall * m + sensor] = 1;
    }
    std::vector<std::vector<double>> lists(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (options.include_direct) lists[i].push_back(emission_time + distance(room.loudspeaker, sensors[i]));
        for (std::size_t w = 0; w < room.walls.size(); ++w) {
            if (dropped[w * m + i]) continue;
            lists[i].push_back(emission_time + distance(scene.mirror_points[w], sensors[i]));
        }
    }
    for (const auto& [sensor, time] : options.spurious) {
        if (sensor >= m) {
            throw Error(ErrorKind::ValidationError, "spurious entry for unknown sensor " + std::to_string(sensor));
        }
        lists[sensor].push_back(time);
    }
    return ReceptionTable(std::move(lists));
}

WallDetection detect_walls(const SensorArray& sensors, const ReceptionTable& table,
                           const Point& source, const MatchConfig& config) {
    if (source.size() != sensors.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "source and sensors differ in dimension");
    }
    WallDetection out;
    out.match = match_events(sensors, table, config);
    // Events closer to the loudspeaker than the dedup radius are the direct sound.
    const double near = std::max(1e-9, config.dedup_pos_eps_rel * sensors.diameter());
    for (const auto& ev : out.match.events) {
        if (distance(ev.event.position, source) <= near) {
            if (!out.direct) out.direct = ev;
            continue;
        }
        Wall w = wall_from_mirror(source, ev.event.position);
        const bool seen = std::any_of(out.walls.begin(), out.walls.end(), [&](const Wall& o) {
            return same_wall(o, w, 1e-9, near);
        });
        if (!seen) out.walls.push_back(std::move(w));
    }
    return out;
}

std::optional<double> mixed_tuple_margin(const EchoScene& scene, const SensorArray& sensors,
                                         double slack) {
    const std::size_t s = scene.mirror_points.size();
    const std::size_t m = sensors.size();
    if (s < 2) return std::nullopt;
    std::vector<double> dist(s * m);
    for (std::size_t p = 0; p < s; ++p)
        for (std::size_t i = 0; i < m; ++i) dist[p * m + i] = distance(scene.mirror_points[p], sensors[i]);

    double margin = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(m, 0);
    std::vector<double> times(m);
    while (true) {
        const bool all_equal = std::all_of(idx.begin(), idx.end(), [&](std::size_t v) { return v == idx[0]; });
        if (!all_equal) {
            for (std::size_t i = 0; i < m; ++i) times[i] = scene.emission_time + dist[idx[i] * m + i];
            bool plausible = true;
            for (std::size_t i = 0; i < m && plausible; ++i)
                for (std::size_t j = 0; j < i && plausible; ++j)
                    plausible = std::abs(times[i] - times[j]) <= sensors.pair_distance(i, j) + slack;
            if (plausible) margin = std::min(margin, relation_residual(sensors, times));
        }
        std::size_t k = m;
        while (k > 0) {
            if (++idx[k - 1] < s) break;
            idx[k - 1] = 0;
            --k;
        }
        if (k == 0) break;
    }
    return margin;
}

namespace {

struct ConfigurationOutcome {
    bool skipped = false;
    std::size_t ghosts = 0;
    std::size_t missed = 0;
    std::optional<double> margin;
};

ConfigurationOutcome evaluate_configuration(const Room& room, const SensorArray& sensors,
                                            const GoodnessConfig& config) {
    ConfigurationOutcome out;
    const ReceptionTable table = simulate_echoes(room, sensors, 0.0);
    const WallDetection found = detect_walls(sensors, table, room.loudspeaker, config.match);
    const double offset_tol = config.offset_tol_rel * sensors.diameter();
    for (const auto& w : found.walls) {
        const bool real = std::any_of(room.walls.begin(), room.walls.end(), [&](const Wall& t) {
            return same_wall(t, w, config.angle_tol, offset_tol);
        });
        if (!real) ++out.ghosts;
    }
    for (const auto& t : room.walls) {
        const bool hit = std::any_of(found.walls.begin(), found.walls.end(), [&](const Wall& w) {
            return same_wall(t, w, config.angle_tol, offset_tol);
        });
        if (!hit) ++out.missed;
    }
    out.margin = mixed_tuple_margin(echo_scene(room, 0.0), sensors,
                                    default_prune_slack(sensors, config.match));
    return out;
}

}  // namespace

GoodnessReport goodness_check(const Room& room, const SensorArray& sensors,
                              const GoodnessConfig& config) {
    room.validate();
    if (sensors.dim() != room.loudspeaker.size()) {
        throw Error(ErrorKind::DimensionMismatch, "sensors and room differ in dimension");
    }
    const std::size_t total = config.trials + 1;
    std::vector<ConfigurationOutcome> outcomes(total);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(total); ++c) {
        auto& out = outcomes[static_cast<std::size_t>(c)];
        try {
            if (c == 0) {
                out = evaluate_configuration(room, sensors, config);
                continue;
            }
            std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                              static_cast<std::uint32_t>(c)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> jitter(0.0, config.perturbation * sensors.diameter());
            std::vector<Point> moved = sensors.positions();
            for (auto& p : moved)
                for (double& v : p) v += jitter(rng);
            out = evaluate_configuration(room, SensorArray(std::move(moved)), config);
        } catch (const Error&) {
            out = ConfigurationOutcome{};
            out.skipped = true;
        }
    }

    GoodnessReport report;
    report.configurations = total;
    for (const auto& o : outcomes) {
        if (o.skipped) {
            ++report.skipped_configurations;
            continue;
        }
        report.ghost_walls_found += o.ghosts;
        report.missed_walls += o.missed;
        if (o.ghosts > 0) ++report.configurations_with_ghosts;
        if (o.margin) {
            report.max_offdiagonal_residual_margin =
                report.max_offdiagonal_residual_margin ? std::min(*report.max_offdiagonal_residual_margin, *o.margin)
                                                       : *o.margin;
        }
    }
    if (report.max_offdiagonal_residual_margin) {
        report.margin_collapsed = *report.max_offdiagonal_residual_margin <= config.collapse_threshold;
    }
    return report;
}

}  // namespace mlat
