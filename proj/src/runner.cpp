#include "mlat/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "mlat/acoustics.hpp"
#include "mlat/errors.hpp"
#include "mlat/lateration.hpp"
#include "mlat/matching.hpp"

namespace mlat {

int exit_status(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::LengthMismatch:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::ParseError:
        case ErrorKind::ValidationError:
            return kExitValidation;
        case ErrorKind::RankDeficient:
        case ErrorKind::NotSpanning:
        case ErrorKind::TheoremViolation:
        case ErrorKind::DegenerateMirror:
        case ErrorKind::BudgetExceeded:
            return kExitNumeric;
    }
    return kExitNumeric;
}

namespace {

enum class Driver { None, Events, Table, Room };

std::string_view driver_name(Driver d) {
    switch (d) {
        case Driver::Events: return "events";
        case Driver::Table: return "reception_table";
        case Driver::Room: return "room";
        case Driver::None: break;
    }
    return "none";
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ValidationError, what); }

Driver pick_driver(std::string_view command, const Scenario& s, std::initializer_list<Driver> accepted) {
    std::vector<Driver> present;
    if (s.events) present.push_back(Driver::Events);
    if (s.reception_table) present.push_back(Driver::Table);
    if (s.room) present.push_back(Driver::Room);
    if (present.size() != 1) {
        std::string found;
        for (Driver d : present) found += (found.empty() ? "" : ", ") + std::string(driver_name(d));
        invalid("exactly one of events, reception_table, room must drive '" + std::string(command) +
                "' (found: " + (found.empty() ? "none" : found) + ")");
    }
    if (std::find(accepted.begin(), accepted.end(), present[0]) == accepted.end()) {
        invalid("'" + std::string(command) + "' cannot be driven by " + std::string(driver_name(present[0])));
    }
    return present[0];
}

std::string join(const Point& p) {
    std::string out;
    for (std::size_t k = 0; k < p.size(); ++k) out += (k ? " " : "") + format_number(p[k]);
    return out;
}

std::string join_indices(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? " " : "") + std::to_string(v[k]);
    return out;
}

std::vector<std::string> position_header(std::size_t n, const char* prefix) {
    std::vector<std::string> h;
    for (std::size_t k = 1; k <= n; ++k) h.push_back(prefix + std::to_string(k));
    return h;
}

CsvTable events_table(std::size_t n) {
    CsvTable t;
    t.header.push_back("time");
    for (auto& h : position_header(n, "x")) t.header.push_back(std::move(h));
    t.header.push_back("spurious");
    t.header.push_back("residual");
    return t;
}

void add_event_row(CsvTable& t, const Scenario& s, const EmissionEvent& e, bool spurious, double residual) {
    std::vector<std::string> row{format_number(s.to_file_time(e.time))};
    for (double v : e.position) row.push_back(format_number(v));
    row.push_back(spurious ? "true" : "false");
    row.push_back(format_number(residual));
    t.rows.push_back(std::move(row));
}

CsvTable walls_table(std::size_t n, const std::vector<Wall>& walls) {
    CsvTable t;
    t.header = position_header(n, "n");
    t.header.push_back("offset");
    for (const auto& w : walls) {
        std::vector<std::string> row;
        for (double v : w.normal()) row.push_back(format_number(v));
        row.push_back(format_number(w.offset()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable reception_csv(const Scenario& s, const ReceptionTable& table) {
    CsvTable t;
    t.header = {"sensor", "time"};
    for (std::size_t i = 0; i < table.sensors(); ++i)
        for (double v : table[i]) t.rows.push_back({std::to_string(i), format_number(s.to_file_time(v))});
    return t;
}

// Residual of the absolute-value model, which both roots of the quadratic satisfy.
double abs_model_residual(const SensorArray& sensors, std::span<const double> times, const EmissionEvent& e) {
    double r = 0.0;
    for (std::size_t i = 0; i < sensors.size(); ++i)
        r = std::max(r, std::abs(distance(sensors[i], e.position) - std::abs(times[i] - e.time)));
    return r;
}

std::uint64_t effective_seed(const Scenario& s, const RunOptions& o) { return o.seed.value_or(s.rng_seed); }

MatchConfig match_config(const RunOptions& o) {
    MatchConfig c;
    c.residual_threshold = o.tolerance;
    c.budget = o.budget;
    c.keep_ambiguous = o.keep_ambiguous;
    c.solve.rank_tol = o.rank_tol;
    return c;
}

// Adds the scenario's spurious registrations to a table.
ReceptionTable inject(const Scenario& s, const RunOptions& o, std::vector<std::vector<double>> lists) {
    for (const auto& [sensor, t] : s.spurious) lists[sensor].push_back(t);
    if (s.random_spurious) {
        const auto& r = *s.random_spurious;
        const std::uint64_t seed = effective_seed(s, o);
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> u(r.min_time, r.max_time);
        for (std::size_t k = 0; k < r.count; ++k) lists[r.sensor].push_back(u(rng));
    }
    return ReceptionTable(std::move(lists));
}

std::vector<std::vector<double>> table_from_events(const SensorArray& sensors,
                                                   const std::vector<EmissionEvent>& events) {
    std::vector<std::vector<double>> lists(sensors.size());
    for (const auto& e : events) {
        if (e.position.size() != sensors.dim()) invalid("event position dimension differs from sensors");
        const auto t = arrival_times(sensors, e);
        for (std::size_t i = 0; i < t.size(); ++i) lists[i].push_back(t[i]);
    }
    return lists;
}

void report_match(Report& r, const Scenario& s, const MatchReport& m) {
    r.add("match.candidate_tuples", m.candidate_tuples);
    r.add("match.pruned_tuples", m.pruned_tuples);
    r.add("match.accepted_tuples", m.accepted_tuples);
    r.add("match.rejected_tuples", m.rejected_tuples);
    r.add("match.ambiguous_dropped", m.ambiguous_dropped);
    r.add("match.skipped_tuples", m.skipped.size());
    for (std::size_t k = 0; k < m.skipped.size(); ++k) {
        r.add("skipped." + std::to_string(k), join_indices(m.skipped[k].indices) + " " +
                                                  std::string(to_string(m.skipped[k].kind)));
    }
    r.add("events.count", m.events.size());
    for (std::size_t k = 0; k < m.events.size(); ++k) {
        const auto& e = m.events[k];
        const std::string p = "event." + std::to_string(k) + ".";
        r.add(p + "time", s.to_file_time(e.event.time));
        r.add(p + "position", join(e.event.position));
        r.add(p + "fit_residual", e.fit_residual);
        r.add(p + "relation_residual", e.provenance.residual);
        r.add(p + "indices", join_indices(e.provenance.indices));
        r.add(p + "path", e.provenance.path == SolvePath::FullRank ? "full-rank" : "quadratic");
        r.add(p + "ambiguous", e.provenance.ambiguous);
        r.add(p + "support", e.provenance.support);
    }
    CsvTable t = events_table(s.dimension);
    for (const auto& e : m.events) add_event_row(t, s, e.event, false, e.fit_residual);
    r.set_table("events", std::move(t));
}

void cmd_solve(Report& r, const Scenario& s, const RunOptions& o, const SensorArray& sensors) {
    const Driver d = pick_driver("solve", s, {Driver::Events, Driver::Table});
    std::vector<double> times;
    if (d == Driver::Events) {
        if (s.events->size() != 1) invalid("solve needs exactly one event");
        times = arrival_times(sensors, s.events->front());
    } else {
        for (std::size_t i = 0; i < s.reception_table->size(); ++i) {
            const auto& list = (*s.reception_table)[i];
            if (list.size() != 1) invalid("solve needs exactly one time per sensor (sensor " + std::to_string(i) + ")");
            times.push_back(list[0]);
        }
    }
    SolveConfig cfg;
    cfg.rank_tol = o.rank_tol;
    const SolveResult res = solve(sensors, times, cfg);
    r.add("solve.path", res.path == SolvePath::FullRank ? "full-rank" : "quadratic");
    r.add("solve.rank_of_a", res.rank_of_a);
    if (res.quadratic) {
        r.add("solve.quadratic.a", res.quadratic->a);
        r.add("solve.quadratic.b", res.quadratic->b);
        r.add("solve.quadratic.c", res.quadratic->c);
    }
    if (res.root_kind) {
        static constexpr const char* names[] = {"two-real", "one-real", "no-real", "degenerate-linear",
                                                "degenerate-all"};
        r.add("solve.root_kind", names[static_cast<int>(*res.root_kind)]);
    }
    if (res.direction) r.add("solve.direction", join(*res.direction));
    CsvTable t = events_table(s.dimension);
    r.add("candidates.count", res.candidates.size());
    for (std::size_t k = 0; k < res.candidates.size(); ++k) {
        const auto& c = res.candidates[k];
        const double resid = abs_model_residual(sensors, times, c.event);
        const std::string p = "candidate." + std::to_string(k) + ".";
        r.add(p + "time", s.to_file_time(c.event.time));
        r.add(p + "position", join(c.event.position));
        r.add(p + "spurious", c.spurious);
        r.add(p + "residual", resid);
        add_event_row(t, s, c.event, c.spurious, resid);
    }
    r.set_table("events", std::move(t));
}

void cmd_match(Report& r, const Scenario& s, const RunOptions& o, const SensorArray& sensors) {
    const Driver d = pick_driver("match", s, {Driver::Events, Driver::Table});
    const ReceptionTable table =
        inject(s, o, d == Driver::Events ? table_from_events(sensors, *s.events) : *s.reception_table);
    r.add("reception.total", [&] {
        std::size_t n = 0;
        for (const auto& l : table.lists()) n += l.size();
        return n;
    }());
    report_match(r, s, match_events(sensors, table, match_config(o)));
}

ReceptionTable simulate_room(const Scenario& s, const RunOptions& o, const SensorArray& sensors) {
    EchoOptions opts;
    opts.include_direct = s.include_direct;
    opts.dropout = s.dropout;
    const ReceptionTable clean = simulate_echoes(*s.room, sensors, s.emission_time, opts);
    return inject(s, o, clean.lists());
}

void cmd_simulate(Report& r, const Scenario& s, const RunOptions& o, const SensorArray& sensors) {
    const Driver d = pick_driver("simulate", s, {Driver::Events, Driver::Room});
    const ReceptionTable table =
        d == Driver::Room ? simulate_room(s, o, sensors) : inject(s, o, table_from_events(sensors, *s.events));
    for (std::size_t i = 0; i < table.sensors(); ++i) r.add("reception.sensor." + std::to_string(i), table[i].size());
    r.set_table("reception", reception_csv(s, table));
}

void cmd_detect_walls(Report& r, const Scenario& s, const RunOptions& o, const SensorArray& sensors) {
    const Driver d = pick_driver("detect-walls", s, {Driver::Room, Driver::Table});
    Point source;
    ReceptionTable table;
    if (d == Driver::Room) {
        source = s.room->loudspeaker;
        table = simulate_room(s, o, sensors);
    } else {
        if (!s.loudspeaker) invalid("detect-walls from a reception_table needs a loudspeaker");
        source = *s.loudspeaker;
        table = inject(s, o, *s.reception_table);
    }
    const MatchConfig cfg = match_config(o);
    const WallDetection found = detect_walls(sensors, table, source, cfg);
    report_match(r, s, found.match);
    r.add("walls.count", found.walls.size());
    for (std::size_t k = 0; k < found.walls.size(); ++k) {
        const std::string p = "wall." + std::to_string(k) + ".";
        r.add(p + "normal", join(found.walls[k].normal()));
        r.add(p + "offset", found.walls[k].offset());
    }
    r.add("direct.found", found.direct.has_value());
    if (d == Driver::Room) {
        GoodnessConfig gc;  // recovery tolerances only
        const double offset_tol = gc.offset_tol_rel * sensors.diameter();
        std::size_t ghosts = 0;
        std::size_t missed = 0;
        for (const auto& w : found.walls) {
            ghosts += std::none_of(s.room->walls.begin(), s.room->walls.end(),
                                   [&](const Wall& t) { return same_wall(t, w, gc.angle_tol, offset_tol); });
        }
        for (const auto& t : s.room->walls) {
            missed += std::none_of(found.walls.begin(), found.walls.end(),
                                   [&](const Wall& w) { return same_wall(t, w, gc.angle_tol, offset_tol); });
        }
        r.add("truth.walls", s.room->walls.size());
        r.add("truth.ghost_walls", ghosts);
        r.add("truth.missed_walls", missed);
    }
    r.set_table("walls", walls_table(s.dimension, found.walls));
}

void cmd_check_geometry(Report& r, const SensorArray& sensors) {
    const GeometryReport g = check_geometry(sensors);
    r.add("geometry.noncoplanar", g.noncoplanar);
    r.add("geometry.condition_applicable", g.condition_applicable);
    r.add("geometry.condition_ok", g.condition_ok);
    r.add("geometry.failing_patterns", g.failing_sign_patterns.size());
    for (std::size_t k = 0; k < g.failing_sign_patterns.size(); ++k) {
        std::string p;
        for (int e : g.failing_sign_patterns[k]) p += (p.empty() ? "" : " ") + std::string(e > 0 ? "+1" : "-1");
        r.add("geometry.failing_pattern." + std::to_string(k), p);
    }
    r.add("geometry.degenerate_subsets", g.degenerate_subsets.size());
    for (std::size_t k = 0; k < g.degenerate_subsets.size(); ++k)
        r.add("geometry.degenerate_subset." + std::to_string(k), join_indices(g.degenerate_subsets[k]));
}

void cmd_goodness(Report& r, const Scenario& s, const RunOptions& o, const SensorArray& sensors) {
    pick_driver("goodness", s, {Driver::Room});
    GoodnessConfig gc;
    gc.match = match_config(o);
    gc.seed = effective_seed(s, o);
    gc.trials = o.trials.value_or(s.trials.value_or(gc.trials));
    if (s.perturbation) gc.perturbation = *s.perturbation;
    r.add("config.trials", gc.trials);
    r.add("config.perturbation", gc.perturbation);
    const GoodnessReport g = goodness_check(*s.room, sensors, gc);
    r.add("goodness.configurations", g.configurations);
    r.add("goodness.skipped_configurations", g.skipped_configurations);
    r.add("goodness.ghost_walls_found", g.ghost_walls_found);
    r.add("goodness.configurations_with_ghosts", g.configurations_with_ghosts);
    r.add("goodness.missed_walls", g.missed_walls);
    r.add("goodness.mixed_tuple_margin",
          g.max_offdiagonal_residual_margin ? format_number(*g.max_offdiagonal_residual_margin) : "none");
    r.add("goodness.margin_collapsed", g.margin_collapsed);
    r.add("goodness.good_position", g.configurations_with_ghosts == 0 && g.missed_walls == 0);
}

}  // namespace

RunResult run(std::string_view command, const Scenario& scenario, const RunOptions& options) {
    RunResult out;
    Report& r = out.report;
    r.add("tool", "mlat " + std::string(kToolVersion));
    r.add("command", std::string(command));
    r.add("scenario", std::filesystem::path(scenario.name).filename().string());
    r.add("dimension", scenario.dimension);
    r.add("sensors", scenario.sensors.size());
    r.add("speed", scenario.speed);
    r.add("config.tolerance", options.tolerance);
    r.add("config.rank_tol", options.rank_tol);
    r.add("config.seed", effective_seed(scenario, options));
    r.add("config.budget", options.budget);
    r.add("config.keep_ambiguous", options.keep_ambiguous);
    const MatchConfig defaults;
    r.add("config.fit_tol_rel", defaults.fit_tol_rel);
    r.add("config.dedup_time_eps", defaults.dedup_time_eps);
    r.add("config.dedup_pos_eps_rel", defaults.dedup_pos_eps_rel);

    try {
        const SensorArray sensors(scenario.sensors);
        if (command == "solve") {
            cmd_solve(r, scenario, options, sensors);
        } else if (command == "match") {
            cmd_match(r, scenario, options, sensors);
        } else if (command == "simulate") {
            cmd_simulate(r, scenario, options, sensors);
        } else if (command == "detect-walls") {
            cmd_detect_walls(r, scenario, options, sensors);
        } else if (command == "check-geometry") {
            cmd_check_geometry(r, sensors);
        } else if (command == "goodness") {
            cmd_goodness(r, scenario, options, sensors);
        } else {
            invalid("unknown command '" + std::string(command) + "'");
        }
        r.add("status", "ok");
    } catch (const Error& e) {
        out.status = exit_status(e.kind());
        r.add("status", "error");
        r.add("error.kind", std::string(to_string(e.kind())));
        r.add("error.message", e.what());
    }
    r.add("exit_status", out.status);
    return out;
}

}  // namespace mlat
