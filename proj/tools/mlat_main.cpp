// mlat: multilateration, event matching and echo-based wall detection.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mlat/errors.hpp"
#include "mlat/runner.hpp"
#include "mlat/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Multilateration from unmatched reception times"};
    app.set_version_flag("--version", std::string("mlat ") + std::string(mlat::kToolVersion));
    app.require_subcommand(1);

    mlat::RunOptions opts;
    std::string scenario_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    bool quiet = false;

    const char* commands[][2] = {
        {"solve", "Locate a single event from one time per sensor"},
        {"match", "Detect events from unmatched reception times"},
        {"simulate", "Generate reception times for a room or a list of events"},
        {"detect-walls", "Recover room walls from first-order echoes"},
        {"check-geometry", "Report sensor-geometry diagnostics"},
        {"goodness", "Count ghost walls over jittered sensor arrays"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--tolerance", opts.tolerance, "Relation residual threshold")->capture_default_str();
        sub->add_option("--rank-tol", opts.rank_tol, "Relative singular-value cutoff")->capture_default_str();
        sub->add_option("--seed", seed, "RNG seed (overrides the scenario's rng_seed)");
        sub->add_option("--budget", opts.budget, "Maximum size of the tuple product")->capture_default_str();
        sub->add_option("--output", output_dir, "Directory for report.txt and CSV tables");
        sub->add_flag("--keep-ambiguous,!--drop-ambiguous", opts.keep_ambiguous,
                      "Keep both causal candidates of a tuple")
            ->capture_default_str();
        sub->add_option("--trials", trials, "Perturbed arrays for goodness");
        sub->add_flag("-q,--quiet", quiet, "Do not print the report");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mlat::kExitValidation;
    }
    const CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--trials")) opts.trials = trials;

    try {
        const mlat::Scenario scenario = mlat::load_scenario(scenario_path);
        const mlat::RunResult result = mlat::run(sub->get_name(), scenario, opts);
        if (!quiet) std::cout << result.report.render();
        if (!output_dir.empty()) result.report.write(output_dir);
        if (result.status != mlat::kExitOk) std::cerr << "mlat: " << result.report.value("error.message") << "\n";
        return result.status;
    } catch (const mlat::Error& e) {
        std::cerr << "mlat: " << e.what() << "\n";
        return mlat::exit_status(e.kind());
    }
}
