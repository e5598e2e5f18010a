#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlat/errors.hpp"
#include "mlat/geometry.hpp"
#include "mlat/lateration.hpp"

namespace mlat {

/// Per-sensor reception timestamps T_1..T_m (speed-1 units). Each list is
/// kept sorted ascending with duplicates closer than 1e-12 merged.
class ReceptionTable {
public:
    ReceptionTable() = default;
    explicit ReceptionTable(std::vector<std::vector<double>> lists);

    std::size_t sensors() const noexcept { return lists_.size(); }
    const std::vector<double>& operator[](std::size_t i) const noexcept { return lists_[i]; }
    const std::vector<std::vector<double>>& lists() const noexcept { return lists_; }

    /// |T_1| x ... x |T_m|, saturating at UINT64_MAX.
    std::uint64_t product_size() const noexcept;

    friend bool operator==(const ReceptionTable&, const ReceptionTable&) = default;

private:
    std::vector<std::vector<double>> lists_;
};

struct MatchConfig {
    double residual_threshold = 1e-6;
    double dedup_time_eps = 1e-6;
    /// Position dedup radius as a fraction of the sensor diameter.
    double dedup_pos_eps_rel = 1e-6;
    /// Keep both candidates when a tuple has two causal solutions.
    bool keep_ambiguous = true;
    std::uint64_t budget = 10'000'000;
    /// A candidate must reproduce every time of its tuple to within
    /// fit_tol_rel * sensor diameter.
    double fit_tol_rel = 1e-6;
    /// Pairwise slack for tuple pruning; unset means twice the fit tolerance,
    /// which keeps pruning from removing any tuple that could yield an event.
    std::optional<double> prune_slack;
    SolveConfig solve;
};

struct EventProvenance {
    std::vector<std::size_t> indices;  // position in each T_i
    std::vector<double> times;
    double residual = 0.0;
    SolvePath path = SolvePath::FullRank;
    bool ambiguous = false;
    /// Number of tuples that produced this event before dedup.
    std::size_t support = 1;
};

struct DetectedEvent {
    EmissionEvent event;
    double fit_residual = 0.0;
    EventProvenance provenance;
};

struct SkippedTuple {
    std::vector<std::size_t> indices;
    ErrorKind kind = ErrorKind::InvalidArgument;
};

struct MatchReport {
    std::vector<DetectedEvent> events;  // by (time, position) ascending
    std::uint64_t candidate_tuples = 0; // size of the full product
    std::uint64_t pruned_tuples = 0;
    std::uint64_t accepted_tuples = 0;  // passed the relation test
    std::uint64_t rejected_tuples = 0;  // contributed no event
    std::uint64_t ambiguous_dropped = 0;
    std::vector<SkippedTuple> skipped;  // solver failures, sweep continues
};

double default_prune_slack(const SensorArray& sensors, const MatchConfig& config);

/// Lexicographic walk over T_1 x ... x T_m that only visits tuples with
/// |t_i - t_j| <= d_ij + slack for every pair, a necessary condition for a
/// common source. An optional prefix pins the leading indices.
class TupleEnumerator {
public:
    TupleEnumerator(const SensorArray& sensors, const ReceptionTable& table, double slack,
                    std::span<const std::size_t> prefix = {});

    /// Advances to the next surviving tuple; false once exhausted.
    bool next();

    std::span<const std::size_t> indices() const noexcept { return pos_; }
    std::span<const double> times() const noexcept { return times_; }

private:
    void open(std::size_t level);

    const SensorArray& sensors_;
    const ReceptionTable& table_;
    double slack_;
    std::size_t fixed_ = 0;
    bool started_ = false;
    bool exhausted_ = false;
    std::vector<std::size_t> pos_;
    std::vector<std::size_t> end_;
    std::vector<double> times_;
};

/// Materialised list of surviving index tuples.
std::vector<std::vector<std::size_t>> prune_tuples(const SensorArray& sensors,
                                                   const ReceptionTable& table, double slack);

/// Detects emission events from unmatched reception times: every tuple with
/// one time per sensor passing the relation test is multilaterated and the
/// causal, self-consistent candidates are collected and deduplicated.
/// Pruned sweep, OpenMP-parallel over leading index pairs; the output does
/// not depend on the thread count.
MatchReport match_events(const SensorArray& sensors, const ReceptionTable& table,
                         const MatchConfig& config = {});

/// Serial reference: the full Cartesian product in lexicographic order, no
/// pruning. Kept for testing and benchmarking the kernel above.
MatchReport match_events_reference(const SensorArray& sensors, const ReceptionTable& table,
                                   const MatchConfig& config = {});

}  // namespace mlat
