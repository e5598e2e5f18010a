#include "mlat/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mlat/errors.hpp"

namespace mlat {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
    throw Error(ErrorKind::ParseError, "field '" + field + "': " + what);
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ValidationError, what); }

double number(const json& j, const std::string& field) {
    if (!j.is_number()) parse_fail(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) parse_fail(field, "number is not finite");
    return v;
}

std::size_t index(const json& j, const std::string& field) {
    if (!j.is_number_unsigned()) parse_fail(field, "expected a non-negative integer");
    return j.get<std::size_t>();
}

Point point(const json& j, const std::string& field) {
    if (!j.is_array()) parse_fail(field, "expected an array of coordinates");
    Point p;
    for (std::size_t k = 0; k < j.size(); ++k) p.push_back(number(j[k], field + "[" + std::to_string(k) + "]"));
    return p;
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) parse_fail(where.empty() ? key : where + "." + key, "missing");
    return obj.at(key);
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) parse_fail(where, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            parse_fail(where.empty() ? key : where + "." + key, "unknown field");
        }
    }
}

void check_dim(const Point& p, std::size_t n, const std::string& field) {
    if (p.size() != n) {
        invalid(field + " has dimension " + std::to_string(p.size()) + " but the scenario dimension is " +
                std::to_string(n));
    }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports the byte just past the offending token
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw Error(ErrorKind::ParseError, name + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                               ": malformed JSON");
    }
    only_keys(doc,
              {"dimension", "speed", "sensors", "events", "reception_table", "room", "loudspeaker",
               "dropout", "spurious", "random_spurious", "rng_seed", "goodness", "description"},
              "");

    Scenario s;
    s.name = std::move(name);
    s.dimension = index(require(doc, "dimension", ""), "dimension");
    if (s.dimension < 2) invalid("dimension must be at least 2");
    if (doc.contains("speed")) s.speed = number(doc["speed"], "speed");
    if (!(s.speed > 0.0)) invalid("speed must be positive");
    const double speed = s.speed;

    const json& sensors = require(doc, "sensors", "");
    if (!sensors.is_array()) parse_fail("sensors", "expected an array");
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const std::string f = "sensors[" + std::to_string(i) + "]";
        s.sensors.push_back(point(sensors[i], f));
        check_dim(s.sensors.back(), s.dimension, f);
    }
    if (s.sensors.empty()) invalid("sensors list is empty");
    const std::size_t m = s.sensors.size();

    if (doc.contains("events")) {
        const json& ev = doc["events"];
        if (!ev.is_array()) parse_fail("events", "expected an array");
        std::vector<EmissionEvent> events;
        for (std::size_t e = 0; e < ev.size(); ++e) {
            const std::string f = "events[" + std::to_string(e) + "]";
            only_keys(ev[e], {"time", "position"}, f);
            EmissionEvent x;
            x.time = number(require(ev[e], "time", f), f + ".time") * speed;
            x.position = point(require(ev[e], "position", f), f + ".position");
            check_dim(x.position, s.dimension, f + ".position");
            events.push_back(std::move(x));
        }
        s.events = std::move(events);
    }

    if (doc.contains("reception_table")) {
        const json& tab = doc["reception_table"];
        if (!tab.is_array()) parse_fail("reception_table", "expected an array of per-sensor lists");
        if (tab.size() != m) {
            invalid("reception_table has " + std::to_string(tab.size()) + " lists for " + std::to_string(m) +
                    " sensors");
        }
        std::vector<std::vector<double>> lists(m);
        for (std::size_t i = 0; i < m; ++i) {
            const std::string f = "reception_table[" + std::to_string(i) + "]";
            if (!tab[i].is_array()) parse_fail(f, "expected an array of times");
            for (std::size_t k = 0; k < tab[i].size(); ++k)
                lists[i].push_back(number(tab[i][k], f + "[" + std::to_string(k) + "]") * speed);
        }
        s.reception_table = std::move(lists);
    }

    if (doc.contains("room")) {
        const json& r = doc["room"];
        only_keys(r, {"walls", "loudspeaker", "emission_time", "include_direct"}, "room");
        Room room;
        room.loudspeaker = point(require(r, "loudspeaker", "room"), "room.loudspeaker");
        check_dim(room.loudspeaker, s.dimension, "room.loudspeaker");
        const json& walls = require(r, "walls", "room");
        if (!walls.is_array()) parse_fail("room.walls", "expected an array");
        for (std::size_t w = 0; w < walls.size(); ++w) {
            const std::string f = "room.walls[" + std::to_string(w) + "]";
            only_keys(walls[w], {"normal", "offset"}, f);
            Point normal = point(require(walls[w], "normal", f), f + ".normal");
            check_dim(normal, s.dimension, f + ".normal");
            const double offset = number(require(walls[w], "offset", f), f + ".offset");
            if (norm(normal) == 0.0) invalid(f + ".normal is the zero vector");
            room.walls.emplace_back(std::move(normal), offset);
        }
        if (r.contains("emission_time")) s.emission_time = number(r["emission_time"], "room.emission_time") * speed;
        if (r.contains("include_direct")) {
            if (!r["include_direct"].is_boolean()) parse_fail("room.include_direct", "expected a boolean");
            s.include_direct = r["include_direct"].get<bool>();
        }
        for (std::size_t w = 0; w < room.walls.size(); ++w) {
            if (std::abs(room.walls[w].signed_distance(room.loudspeaker)) <= 1e-9) {
                invalid("room.loudspeaker lies on room.walls[" + std::to_string(w) + "]");
            }
        }
        s.room = std::move(room);
    }

    if (doc.contains("loudspeaker")) {
        s.loudspeaker = point(doc["loudspeaker"], "loudspeaker");
        check_dim(*s.loudspeaker, s.dimension, "loudspeaker");
    }

    if (doc.contains("dropout")) {
        const json& d = doc["dropout"];
        if (!d.is_array()) parse_fail("dropout", "expected an array");
        for (std::size_t k = 0; k < d.size(); ++k) {
            const std::string f = "dropout[" + std::to_string(k) + "]";
            only_keys(d[k], {"wall", "sensor"}, f);
            const std::size_t wall = index(require(d[k], "wall", f), f + ".wall");
            const std::size_t sensor = index(require(d[k], "sensor", f), f + ".sensor");
            if (sensor >= m) invalid(f + ".sensor out of range");
            if (!s.room || wall >= s.room->walls.size()) invalid(f + ".wall does not name a room wall");
            s.dropout.emplace_back(wall, sensor);
        }
    }

    if (doc.contains("spurious")) {
        const json& sp = doc["spurious"];
        if (!sp.is_array()) parse_fail("spurious", "expected an array");
        for (std::size_t k = 0; k < sp.size(); ++k) {
            const std::string f = "spurious[" + std::to_string(k) + "]";
            only_keys(sp[k], {"sensor", "time"}, f);
            const std::size_t sensor = index(require(sp[k], "sensor", f), f + ".sensor");
            if (sensor >= m) invalid(f + ".sensor out of range");
            s.spurious.emplace_back(sensor, number(require(sp[k], "time", f), f + ".time") * speed);
        }
    }

    if (doc.contains("random_spurious")) {
        const json& rs = doc["random_spurious"];
        only_keys(rs, {"sensor", "count", "min_time", "max_time"}, "random_spurious");
        RandomSpurious r;
        r.sensor = index(require(rs, "sensor", "random_spurious"), "random_spurious.sensor");
        r.count = index(require(rs, "count", "random_spurious"), "random_spurious.count");
        r.min_time = number(require(rs, "min_time", "random_spurious"), "random_spurious.min_time") * speed;
        r.max_time = number(require(rs, "max_time", "random_spurious"), "random_spurious.max_time") * speed;
        if (r.sensor >= m) invalid("random_spurious.sensor out of range");
        if (!(r.min_time < r.max_time)) invalid("random_spurious needs min_time < max_time");
        s.random_spurious = r;
    }

    if (doc.contains("rng_seed")) s.rng_seed = index(doc["rng_seed"], "rng_seed");

    if (doc.contains("goodness")) {
        const json& g = doc["goodness"];
        only_keys(g, {"trials", "perturbation"}, "goodness");
        if (g.contains("trials")) s.trials = index(g["trials"], "goodness.trials");
        if (g.contains("perturbation")) {
            s.perturbation = number(g["perturbation"], "goodness.perturbation");
            if (*s.perturbation < 0.0) invalid("goodness.perturbation must be non-negative");
        }
    }

    SensorArray check(s.sensors);  // distinct, finite positions
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

}  // namespace mlat
