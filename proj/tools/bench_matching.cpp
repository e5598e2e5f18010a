// Times the pruned OpenMP sweep against the serial full-product reference.
#include <chrono>
#include <cstdio>
#include <random>

#include <CLI11.hpp>

#include "mlat/matching.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matching benchmark: OpenMP kernel vs serial reference"};
    std::size_t events = 6;
    std::size_t sensors_n = 5;
    std::size_t repeats = 3;
    std::uint64_t seed = 7;
    app.add_option("--events", events, "Simultaneous emission events")->capture_default_str();
    app.add_option("--sensors", sensors_n, "Sensors in R^3 (5 to 8)")->capture_default_str();
    app.add_option("--repeats", repeats, "Timed repetitions")->capture_default_str();
    app.add_option("--seed", seed, "Scene seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<mlat::Point> pos(sensors_n, mlat::Point(3));
    for (auto& p : pos)
        for (double& v : p) v = u(rng);
    const mlat::SensorArray sensors(pos);
    std::vector<std::vector<double>> lists(sensors_n);
    for (std::size_t e = 0; e < events; ++e) {
        mlat::EmissionEvent ev{u(rng), {2 * u(rng), 2 * u(rng), 2 * u(rng)}};
        const auto t = mlat::arrival_times(sensors, ev);
        for (std::size_t i = 0; i < sensors_n; ++i) lists[i].push_back(t[i]);
    }
    const mlat::ReceptionTable table(lists);

    double t_ref = 0.0;
    double t_par = 0.0;
    mlat::MatchReport ref;
    mlat::MatchReport par;
    for (std::size_t r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        ref = mlat::match_events_reference(sensors, table);
        t_ref += seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        par = mlat::match_events(sensors, table);
        t_par += seconds_since(t0);
    }
    std::printf("tuples %llu  pruned %llu\n", static_cast<unsigned long long>(par.candidate_tuples),
                static_cast<unsigned long long>(par.pruned_tuples));
    std::printf("reference %.6f s  kernel %.6f s  speedup %.2fx\n", t_ref / repeats, t_par / repeats,
                t_par > 0 ? t_ref / t_par : 0.0);
    std::printf("events reference %zu  kernel %zu\n", ref.events.size(), par.events.size());
    return ref.events.size() == par.events.size() ? 0 : 1;
}
