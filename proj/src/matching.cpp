#include "mlat/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <iterator>

#include "matching_detail.hpp"
#include "mlat/relations.hpp"

namespace mlat {

ReceptionTable::ReceptionTable(std::vector<std::vector<double>> lists) : lists_(std::move(lists)) {
    for (std::size_t i = 0; i < lists_.size(); ++i) {
        auto& l = lists_[i];
        for (double t : l) {
            if (!std::isfinite(t)) {
                throw Error(ErrorKind::ValidationError,
                            "non-finite reception time for sensor " + std::to_string(i));
            }
        }
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end(), [](double a, double b) { return b - a <= 1e-12; }),
                l.end());
    }
}

std::uint64_t ReceptionTable::product_size() const noexcept {
    if (lists_.empty()) return 0;
    std::uint64_t p = 1;
    for (const auto& l : lists_) {
        if (l.empty()) return 0;
        if (p > std::numeric_limits<std::uint64_t>::max() / l.size()) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        p *= l.size();
    }
    return p;
}

double default_prune_slack(const SensorArray& sensors, const MatchConfig& config) {
    return config.prune_slack ? *config.prune_slack : 2.0 * config.fit_tol_rel * sensors.diameter();
}

TupleEnumerator::TupleEnumerator(const SensorArray& sensors, const ReceptionTable& table,
                                 double slack, std::span<const std::size_t> prefix)
    : sensors_(sensors), table_(table), slack_(slack), fixed_(prefix.size()) {
    const std::size_t m = table.sensors();
    if (m != sensors.size()) {
        throw Error(ErrorKind::LengthMismatch, "reception table has " + std::to_string(m) +
                                                   " lists for " + std::to_string(sensors.size()) +
                                                   " sensors");
    }
    if (prefix.size() > m) throw Error(ErrorKind::InvalidArgument, "prefix longer than tuple");
    pos_.assign(m, 0);
    end_.assign(m, 0);
    times_.assign(m, 0.0);
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (prefix[i] >= table[i].size()) {
            exhausted_ = true;
            return;
        }
        pos_[i] = prefix[i];
        end_[i] = prefix[i] + 1;
        times_[i] = table[i][prefix[i]];
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(times_[i] - times_[j]) > sensors.pair_distance(i, j) + slack_) exhausted_ = true;
        }
    }
}

void TupleEnumerator::open(std::size_t level) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < level; ++j) {
        const double reach = sensors_.pair_distance(level, j) + slack_;
        lo = std::max(lo, times_[j] - reach);
        hi = std::min(hi, times_[j] + reach);
    }
    const auto& list = table_[level];
    pos_[level] = static_cast<std::size_t>(std::lower_bound(list.begin(), list.end(), lo) - list.begin());
    end_[level] = static_cast<std::size_t>(std::upper_bound(list.begin(), list.end(), hi) - list.begin());
}

bool TupleEnumerator::next() {
    if (exhausted_) return false;
    const std::size_t m = pos_.size();
    std::size_t level;
    if (!started_) {
        started_ = true;
        if (fixed_ == m) {
            exhausted_ = true;  // only the prefix itself, already checked
            return true;
        }
        level = fixed_;
        open(level);
    } else {
        level = m - 1;
        ++pos_[level];
    }
    while (true) {
        if (pos_[level] < end_[level]) {
            times_[level] = table_[level][pos_[level]];
            if (level + 1 == m) return true;
            ++level;
            open(level);
        } else {
            if (level == fixed_) {
                exhausted_ = true;
                return false;
            }
            --level;
            ++pos_[level];
        }
    }
}

std::vector<std::vector<std::size_t>> prune_tuples(const SensorArray& sensors,
                                                   const ReceptionTable& table, double slack) {
    std::vector<std::vector<std::size_t>> out;
    TupleEnumerator it(sensors, table, slack);
    while (it.next()) out.emplace_back(it.indices().begin(), it.indices().end());
    return out;
}

namespace detail {

void check_match_inputs(const SensorArray& sensors, const ReceptionTable& table,
                        const MatchConfig& config) {
    const std::size_t n = sensors.dim();
    if (table.sensors() != sensors.size()) {
        throw Error(ErrorKind::LengthMismatch, "reception table has " +
                                                   std::to_string(table.sensors()) + " lists for " +
                                                   std::to_string(sensors.size()) + " sensors");
    }
    if (sensors.size() < n + 2 || sensors.size() > 8) {
        throw Error(ErrorKind::InvalidArgument,
                    "matching needs between n+2 and 8 sensors, got " + std::to_string(sensors.size()));
    }
    const std::uint64_t product = table.product_size();
    if (product > config.budget) {
        throw Error(ErrorKind::BudgetExceeded, "tuple product " + std::to_string(product) +
                                                   " exceeds budget " + std::to_string(config.budget));
    }
}

void evaluate_tuple(const SensorArray& sensors, const MatchConfig& config,
                    std::span<const std::size_t> indices, std::span<const double> times,
                    SweepOutput& out) {
    ++out.counters.tested;
    const double residual = relation_residual(sensors, times);
    if (!(residual <= config.residual_threshold)) return;
    ++out.counters.accepted;

    SolveResult solved;
    try {
        solved = solve(sensors, times, config.solve);
    } catch (const Error& e) {
        out.skipped.push_back({{indices.begin(), indices.end()}, e.kind()});
        return;
    }

    const double fit_tol = config.fit_tol_rel * sensors.diameter();
    std::vector<DetectedEvent> valid;
    for (auto& c : solved.candidates) {
        if (c.spurious) continue;
        const double fit = model_residual(sensors, times, c.event);
        if (!(fit <= fit_tol)) continue;
        DetectedEvent ev;
        ev.event = std::move(c.event);
        ev.fit_residual = fit;
        ev.provenance.indices.assign(indices.begin(), indices.end());
        ev.provenance.times.assign(times.begin(), times.end());
        ev.provenance.residual = residual;
        ev.provenance.path = solved.path;
        valid.push_back(std::move(ev));
    }
    if (valid.empty()) return;
    if (valid.size() > 1) {
        if (!config.keep_ambiguous) {
            ++out.counters.ambiguous_dropped;
            return;
        }
        for (auto& v : valid) v.provenance.ambiguous = true;
    }
    ++out.counters.contributing;
    for (auto& v : valid) out.records.push_back(std::move(v));
}

MatchReport finalize(const SensorArray& sensors, const ReceptionTable& table,
                     const MatchConfig& config, SweepOutput sweep) {
    MatchReport report;
    report.candidate_tuples = table.product_size();
    report.pruned_tuples = report.candidate_tuples - sweep.counters.tested;
    report.accepted_tuples = sweep.counters.accepted;
    report.rejected_tuples = report.candidate_tuples - sweep.counters.contributing;
    report.ambiguous_dropped = sweep.counters.ambiguous_dropped;
    report.skipped = std::move(sweep.skipped);

    const double pos_eps = config.dedup_pos_eps_rel * sensors.diameter();
    for (auto& rec : sweep.records) {
        auto same = std::find_if(report.events.begin(), report.events.end(), [&](const DetectedEvent& e) {
            return std::abs(e.event.time - rec.event.time) <= config.dedup_time_eps &&
                   distance(e.event.position, rec.event.position) <= pos_eps;
        });
        if (same != report.events.end()) {
            ++same->provenance.support;
        } else {
            report.events.push_back(std::move(rec));
        }
    }
    std::stable_sort(report.events.begin(), report.events.end(),
                     [](const DetectedEvent& a, const DetectedEvent& b) {
                         if (a.event.time != b.event.time) return a.event.time < b.event.time;
                         return a.event.position < b.event.position;
                     });
    return report;
}

}  // namespace detail

MatchReport match_events(const SensorArray& sensors, const ReceptionTable& table,
                         const MatchConfig& config) {
    detail::check_match_inputs(sensors, table, config);
    if (table.product_size() == 0) return detail::finalize(sensors, table, config, {});

    const double slack = default_prune_slack(sensors, config);
    const std::size_t n0 = table[0].size();
    const std::size_t n1 = table[1].size();
    const auto chunks = static_cast<std::int64_t>(n0 * n1);
    std::vector<detail::SweepOutput> partial(static_cast<std::size_t>(chunks));

    // One chunk per leading index pair; chunks are concatenated in index
    // order afterwards, which reproduces the serial lexicographic order.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < chunks; ++c) {
        const std::size_t prefix[2] = {static_cast<std::size_t>(c) / n1, static_cast<std::size_t>(c) % n1};
        auto& out = partial[static_cast<std::size_t>(c)];
        TupleEnumerator it(sensors, table, slack, prefix);
        while (it.next()) detail::evaluate_tuple(sensors, config, it.indices(), it.times(), out);
    }

    detail::SweepOutput merged;
    for (auto& p : partial) {
        merged.counters += p.counters;
        std::move(p.records.begin(), p.records.end(), std::back_inserter(merged.records));
        std::move(p.skipped.begin(), p.skipped.end(), std::back_inserter(merged.skipped));
    }
    return detail::finalize(sensors, table, config, std::move(merged));
}

}  // namespace mlat
