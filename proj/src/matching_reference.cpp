#include <vector>

#include "matching_detail.hpp"

namespace mlat {

MatchReport match_events_reference(const SensorArray& sensors, const ReceptionTable& table,
                                   const MatchConfig& config) {
    detail::check_match_inputs(sensors, table, config);
    const std::size_t m = table.sensors();
    detail::SweepOutput out;
    if (table.product_size() == 0) return detail::finalize(sensors, table, config, std::move(out));

    std::vector<std::size_t> idx(m, 0);
    std::vector<double> times(m);
    while (true) {
        for (std::size_t i = 0; i < m; ++i) times[i] = table[i][idx[i]];
        detail::evaluate_tuple(sensors, config, idx, times, out);

        std::size_t k = m;
        while (k > 0) {
            if (++idx[k - 1] < table[k - 1].size()) break;
            idx[k - 1] = 0;
            --k;
        }
        if (k == 0) break;
    }
    return detail::finalize(sensors, table, config, std::move(out));
}

}  // namespace mlat
