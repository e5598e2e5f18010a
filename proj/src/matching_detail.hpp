#pragma once

// Pieces shared by the parallel matching kernel and its serial reference.

#include <cstdint>
#include <span>
#include <vector>

#include "mlat/matching.hpp"

namespace mlat::detail {

struct SweepCounters {
    std::uint64_t tested = 0;
    std::uint64_t accepted = 0;
    std::uint64_t contributing = 0;
    std::uint64_t ambiguous_dropped = 0;

    SweepCounters& operator+=(const SweepCounters& o) {
        tested += o.tested;
        accepted += o.accepted;
        contributing += o.contributing;
        ambiguous_dropped += o.ambiguous_dropped;
        return *this;
    }
};

struct SweepOutput {
    std::vector<DetectedEvent> records;
    std::vector<SkippedTuple> skipped;
    SweepCounters counters;
};

/// Validates sizes and the tuple budget.
void check_match_inputs(const SensorArray& sensors, const ReceptionTable& table,
                        const MatchConfig& config);

/// Relation test, multilateration and candidate screening for one tuple.
void evaluate_tuple(const SensorArray& sensors, const MatchConfig& config,
                    std::span<const std::size_t> indices, std::span<const double> times,
                    SweepOutput& out);

/// Dedup (first record in sweep order wins) and final (time, position) sort.
MatchReport finalize(const SensorArray& sensors, const ReceptionTable& table,
                     const MatchConfig& config, SweepOutput sweep);

}  // namespace mlat::detail
