// Command-line front end: scenario ingestion, TCAM time simulation, static
// solves, tension sweeps and figure-data emission.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "octoarm/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Quasi-static simulator for a TCAM-actuated soft arm under water"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string scenario_path;
    std::string out_dir = "out";
    bool strict = false;
    std::size_t grid_override = 0;
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("--strict", strict, "Abort on the first non-converged solve");
    app.add_option("--grid", grid_override, "Override the grid node count");

    auto* sim = app.add_subcommand("simulate-tcam", "Integrate the muscle thermal model");
    sim->add_option("scenario", scenario_path, "Scenario file")->required();

    double t11 = 0.0;
    auto* solve = app.add_subcommand("solve", "Static equilibrium at one tension");
    solve->add_option("scenario", scenario_path, "Scenario file")->required();
    solve->add_option("--t11", t11, "Muscle tension T11 in newtons")->required();

    auto* sweep = app.add_subcommand("sweep", "Tension continuation sweep");
    sweep->add_option("scenario", scenario_path, "Scenario file")->required();

    auto* validate = app.add_subcommand("validate", "Parse and check a scenario file");
    validate->add_option("scenario", scenario_path, "Scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        octoarm::CommandContext ctx;
        std::string raw;
        ctx.scenario = octoarm::parse_scenario(scenario_path, &raw);
        if (grid_override > 0) {
            ctx.scenario.arm.geom.node_count = grid_override;
            ctx.scenario.solver.node_count = grid_override;
            ctx.scenario.validate();
        }
        ctx.input_path = scenario_path;
        ctx.input_hash = octoarm::content_hash(raw);
        ctx.out_dir = out_dir;
        ctx.strict = strict;

        int rc = 0;
        if (sim->parsed()) rc = octoarm::cmd_simulate_tcam(ctx);
        if (solve->parsed()) rc = octoarm::cmd_solve(ctx, t11);
        if (sweep->parsed()) rc = octoarm::cmd_sweep(ctx);
        if (validate->parsed()) rc = octoarm::cmd_validate(ctx);
        if (rc == 2) std::fprintf(stderr, "warning: partial results, some solves did not converge\n");
        return rc;
    } catch (const octoarm::ScenarioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
