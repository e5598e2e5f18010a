#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mlat/report.hpp"
#include "mlat/scenario.hpp"

namespace mlat {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunOptions {
    double tolerance = 1e-6;  // relation residual threshold
    double rank_tol = 1e-8;
    /// Overrides the scenario's rng_seed when set.
    std::optional<std::uint64_t> seed;
    std::uint64_t budget = 10'000'000;
    bool keep_ambiguous = true;
    /// Overrides the scenario's goodness trial count when set.
    std::optional<std::size_t> trials;
};

enum ExitStatus : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3 };

struct RunResult {
    Report report;
    int status = kExitOk;
};

/// 2 for malformed input, 3 for numeric failures (rank, spanning, theorem
/// violations, degenerate mirrors, budget).
int exit_status(ErrorKind kind) noexcept;

/// Executes one of solve, match, simulate, detect-walls, check-geometry,
/// goodness. Library errors are caught and recorded in the report.
RunResult run(std::string_view command, const Scenario& scenario, const RunOptions& options = {});

}  // namespace mlat
