#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "harvest/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Two-hop hybrid VLC-RF downlink simulator and optimizer"};

    std::string preset_name;
    harvest::ExperimentRun run;
    std::string mode = "sweep";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> mc_samples;
    std::optional<double> grid_ib, grid_t;

    app.add_option("preset", preset_name,
                   "fig3a|fig3b|fig5|fig6|fig7|case_table|fig8_9_10|fig11_12|validate|custom")
        ->required();
    app.add_option("--scenario", run.scenario_path, "scenario file (key = value lines)");
    app.add_option("--out", run.out_dir, "output directory")->default_val(".");
    app.add_option("--seed", seed, "RNG seed (overrides scenario)");
    app.add_option("--mc-samples", mc_samples, "Monte Carlo sample count");
    app.add_option("--grid-ib", grid_ib, "DC-bias grid step [A]");
    app.add_option("--grid-t", grid_t, "time-split grid step");
    app.add_option("--mode", mode, "sweep|average (fig8_9_10)")
        ->check(CLI::IsMember({"sweep", "average"}));

    CLI11_PARSE(app, argc, argv);

    const auto preset = harvest::parse_preset(preset_name);
    if (!preset) {
        std::cerr << "configuration error: unknown preset '" << preset_name << "'\n";
        return 2;
    }
    run.preset = *preset;
    run.mode = mode == "average" ? harvest::SweepMode::average : harvest::SweepMode::sweep;
    run.seed = seed;
    run.mc_samples = mc_samples;
    run.grid_step_ib = grid_ib;
    run.grid_step_t = grid_t;

    return harvest::run(run);
}
