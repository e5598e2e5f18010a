#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlat/acoustics.hpp"
#include "mlat/geometry.hpp"

namespace mlat {

/// Random spurious registrations injected into one sensor's list.
struct RandomSpurious {
    std::size_t sensor = 0;
    std::size_t count = 0;
    double min_time = 0.0;  // speed-1 units
    double max_time = 0.0;
};

/// A validated scenario file. Every time stored here has already been
/// converted to speed-1 units (multiplied by `speed`); positions are as given.
struct Scenario {
    std::string name;
    std::size_t dimension = 0;
    double speed = 1.0;
    std::vector<Point> sensors;

    std::optional<std::vector<EmissionEvent>> events;
    std::optional<std::vector<std::vector<double>>> reception_table;
    std::optional<Room> room;
    /// Known loudspeaker for detect-walls driven by a reception table.
    std::optional<Point> loudspeaker;

    double emission_time = 0.0;
    bool include_direct = false;
    std::vector<std::pair<std::size_t, std::size_t>> dropout;  // (wall, sensor)
    std::vector<std::pair<std::size_t, double>> spurious;      // (sensor, time)
    std::optional<RandomSpurious> random_spurious;

    std::uint64_t rng_seed = 0;
    std::optional<std::size_t> trials;
    std::optional<double> perturbation;

    /// Converts a speed-1 time back to the file's unit of time.
    double to_file_time(double t) const { return t / speed; }
};

/// Parses and validates scenario JSON text. Throws ParseError (with line and
/// column, or the offending field) and ValidationError (naming the violated
/// constraint).
Scenario parse_scenario(std::string_view text, std::string name = "<memory>");

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace mlat
