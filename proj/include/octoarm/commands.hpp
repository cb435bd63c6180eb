#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "octoarm/report.hpp"
#include "octoarm/scenario.hpp"

namespace octoarm {

namespace fs = std::filesystem;

struct CommandContext {
    Scenario scenario;
    std::string input_path;   // scenario file path, for the report
    std::string input_hash;   // content hash of the scenario file
    fs::path out_dir;
    bool strict = false;
};

namespace detail {

inline void finish_report(const CommandContext& ctx, RunReport& rep) {
    rep.timestamp = RunReport::now_iso8601();
    rep.schema_version = ctx.scenario.schema_version;
    rep.input_path = ctx.input_path;
    rep.input_hash = ctx.input_hash;
    rep.resolved_parameters = scenario_echo(ctx.scenario);
    write_json_file(ctx.out_dir / "run_report.json", rep.to_json());
}

inline std::string tension_tag(double t) { return format_number(t); }

}  // namespace detail

/// Time simulation of the muscle: voltage waveform -> temperature ->
/// tension and contraction. Tension uses the scenario's calibrated
/// coefficient; the contraction transient uses the coil-model chain, and the
/// summary documents both together with the window.
inline int cmd_simulate_tcam(const CommandContext& ctx) {
    const auto& sc = ctx.scenario;
    const auto& wf = sc.tcam.waveform;
    fs::create_directories(ctx.out_dir);

    // zero angular frequency means a constant drive at the amplitude
    auto voltage = [&](double t) {
        if (wf.angular_frequency_radps == 0.0) return wf.amplitude_V;
        return wf.amplitude_V * std::sin(wf.angular_frequency_radps * t);
    };
    const auto series =
        tcam::integrate_temperature(sc.tcam.params, voltage, wf.duration_s, wf.dt_s);

    const double c_lin_chained =
        tcam::linearization_coefficient(sc.tcam.params, sc.tcam.ref_temp_excess_C);
    const double c_lin_used = sc.tcam.tension_coeff_NperC;

    std::vector<double> temps(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) temps[i] = series[i].temp_excess_C;
    const auto contraction =
        tcam::contraction_response(sc.tcam.params, c_lin_chained, temps, wf.dt_s);

    CsvWriter csv(ctx.out_dir / "tcam_timeseries.csv", ctx.input_hash,
                  {"time_s", "voltage_V", "temp_excess_C", "temp_C", "tension_N",
                   "contraction_m"});
    double peak_temp = 0.0, peak_tension = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double T = series[i].temp_excess_C;
        const double F = tcam::tension(sc.tcam.params, c_lin_used, T);
        peak_temp = std::max(peak_temp, T);
        peak_tension = std::max(peak_tension, F);
        csv.row({series[i].time_s, voltage(series[i].time_s), T,
                 T + sc.tcam.params.ambient_temp_C, F, contraction[i]});
    }

    nlohmann::json summary;
    summary["peak_temp_excess_C"] = peak_temp;
    summary["peak_temp_C"] = peak_temp + sc.tcam.params.ambient_temp_C;
    summary["peak_tension_N"] = peak_tension;
    summary["final_temp_C"] = series.back().temp_excess_C + sc.tcam.params.ambient_temp_C;
    summary["window_s"] = wf.duration_s;
    summary["dt_s"] = wf.dt_s;
    summary["c_lin_used_NperC"] = c_lin_used;
    summary["c_lin_chained_NperC"] = c_lin_chained;
    summary["ref_temp_excess_C"] = sc.tcam.ref_temp_excess_C;
    write_json_file(ctx.out_dir / "tcam_summary.json", summary);

    RunReport rep;
    rep.command = "simulate-tcam";
    rep.outputs = {{csv.filename(), csv.rows()}, {"tcam_summary.json", 1}};
    rep.extra = summary;
    detail::finish_report(ctx, rep);
    return 0;
}

namespace detail {

inline nlohmann::json solution_summary(double t11, const EquilibriumSolution& sol) {
    nlohmann::json j;
    j["tension_t11_N"] = t11;
    j["tip_x_m"] = sol.tip.tip_position_m.x;
    j["tip_y_m"] = sol.tip.tip_position_m.y;
    j["tip_height_m"] = sol.tip.tip_height_m;
    j["tilt_deg_at_L"] = sol.tip.tilt_deg_at_L;
    j["theta_deg_at_L"] = sol.tip.theta_deg_at_L;
    j["iterations"] = sol.diagnostics.iterations;
    j["final_residual"] = sol.diagnostics.final_residual;
    j["final_strain_change"] = sol.diagnostics.final_strain_change;
    j["converged"] = sol.diagnostics.converged;
    j["max_detF_error"] = sol.max_detF_error;
    return j;
}

inline OutputEntry write_solution_csv(const CommandContext& ctx, const fs::path& name,
                                      const EquilibriumSolution& sol) {
    const auto& sc = ctx.scenario;
    const auto s = sc.arm.geom.grid();
    const std::size_t n = s.size();
    CsvWriter csv(ctx.out_dir / name, ctx.input_hash,
                  {"s_m", "x_m", "y_m", "theta_deg", "alpha_deg", "tilt_deg", "nu",
                   "eta", "mu_perm", "beta", "N_Pa", "H_Pa", "M", "detF"});
    const double deg = 180.0 / M_PI;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = sol.strains;
        double detF;
        if (i > 0 && i + 1 < n) {
            detF = det_deformation_gradient(sc.arm.geom, f, i);
        } else {
            const double x2 = radius_at(sc.arm.geom, s[i]);
            detF = f.beta_cs[i] * (f.nu[i] - f.beta_cs[i] * x2 * f.mu[i]);
        }
        csv.row({s[i], sol.configuration.r[i].x, sol.configuration.r[i].y,
                 sol.configuration.theta[i] * deg, sol.configuration.alpha[i] * deg,
                 sol.configuration.tilt[i] * deg, f.nu[i], f.eta[i], f.mu[i],
                 f.beta_cs[i], sol.tractions.normal_Pa[i], sol.tractions.shear_Pa[i],
                 sol.tractions.bending[i], detF});
    }
    return {csv.filename(), csv.rows()};
}

}  // namespace detail

/// Single static solve at a given muscle tension.
inline int cmd_solve(const CommandContext& ctx, double t11) {
    Scenario sc = ctx.scenario;
    fs::create_directories(ctx.out_dir);
    sc.arm.layout.segments.at(0).tension_N[1] = sc.sweep.t12;
    const auto sol = solve_static(sc.arm, sc.solver, t11);

    CommandContext local = ctx;
    local.scenario = sc;
    const std::string tag = detail::tension_tag(t11);
    const auto entry = detail::write_solution_csv(local, "arm_T" + tag + ".csv", sol);
    const auto summary = detail::solution_summary(t11, sol);
    write_json_file(ctx.out_dir / ("arm_T" + tag + "_summary.json"), summary);

    RunReport rep;
    rep.command = "solve";
    rep.outputs = {entry, {"arm_T" + tag + "_summary.json", 1}};
    rep.extra = summary;
    detail::finish_report(local, rep);
    if (!sol.diagnostics.converged) return 2;
    return 0;
}

/// Tension continuation sweep with per-step tables and figure-data series.
inline int cmd_sweep(const CommandContext& ctx) {
    Scenario sc = ctx.scenario;
    fs::create_directories(ctx.out_dir);
    sc.arm.layout.segments.at(0).tension_N[1] = sc.sweep.t12;

    const auto sweep = tension_sweep(sc.arm, sc.solver, sc.sweep.t11_min,
                                     sc.sweep.t11_max, sc.sweep.step, ctx.strict);

    CommandContext local = ctx;
    local.scenario = sc;
    RunReport rep;
    rep.command = "sweep";

    CsvWriter summary_csv(ctx.out_dir / "sweep_summary.csv", ctx.input_hash,
                          {"T11_N", "tip_x_m", "tip_y_m", "tilt_deg_L", "theta_deg_L",
                           "iterations", "residual"});
    CsvWriter tilt_csv(ctx.out_dir / "tilt_vs_tension.csv", ctx.input_hash,
                       {"T11_N", "tilt_deg_L"});
    CsvWriter theta_csv(ctx.out_dir / "theta_vs_tension.csv", ctx.input_hash,
                        {"T11_N", "theta_deg_L"});
    for (const auto& e : sweep.entries) {
        const auto& sol = e.solution;
        summary_csv.row({e.tension_t11_N, sol.tip.tip_position_m.x,
                         sol.tip.tip_position_m.y, sol.tip.tilt_deg_at_L,
                         sol.tip.theta_deg_at_L,
                         static_cast<double>(sol.diagnostics.iterations),
                         sol.diagnostics.final_residual});
        tilt_csv.row({e.tension_t11_N, sol.tip.tilt_deg_at_L});
        theta_csv.row({e.tension_t11_N, sol.tip.theta_deg_at_L});
        rep.outputs.push_back(detail::write_solution_csv(
            local, "arm_T" + detail::tension_tag(e.tension_t11_N) + ".csv", sol));
    }
    rep.outputs.push_back({summary_csv.filename(), summary_csv.rows()});
    rep.outputs.push_back({tilt_csv.filename(), tilt_csv.rows()});
    rep.outputs.push_back({theta_csv.filename(), theta_csv.rows()});

    // along-the-arm profiles at a handful of tensions across the range
    std::vector<std::size_t> picks;
    if (!sweep.entries.empty()) {
        const std::size_t last = sweep.entries.size() - 1;
        for (const double frac : {0.0, 0.25, 0.5, 0.75, 1.0})
            picks.push_back(static_cast<std::size_t>(std::llround(frac * static_cast<double>(last))));
        picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    }
    const auto s = sc.arm.geom.grid();
    auto profile = [&](const std::string& file, auto&& value) {
        std::vector<std::string> cols{"s_m"};
        for (auto k : picks)
            cols.push_back("T" + detail::tension_tag(sweep.entries[k].tension_t11_N));
        CsvWriter csv(ctx.out_dir / file, ctx.input_hash, cols);
        const double degf = 180.0 / M_PI;
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::vector<double> row{s[i]};
            for (auto k : picks) row.push_back(value(sweep.entries[k].solution, i, degf));
            csv.row(row);
        }
        rep.outputs.push_back({csv.filename(), csv.rows()});
    };
    if (!picks.empty()) {
        profile("tilt_vs_s.csv", [](const EquilibriumSolution& sol, std::size_t i,
                                    double deg) { return sol.configuration.tilt[i] * deg; });
        profile("beta_vs_s.csv", [](const EquilibriumSolution& sol, std::size_t i,
                                    double) { return sol.strains.beta_cs[i]; });
        profile("traction_normal_vs_s.csv",
                [](const EquilibriumSolution& sol, std::size_t i, double) {
                    return sol.tractions.normal_Pa[i];
                });
        profile("traction_shear_vs_s.csv",
                [](const EquilibriumSolution& sol, std::size_t i, double) {
                    return sol.tractions.shear_Pa[i];
                });
        profile("bending_vs_s.csv", [](const EquilibriumSolution& sol, std::size_t i,
                                       double) { return sol.tractions.bending[i]; });
    }

    nlohmann::json extra;
    extra["partial"] = sweep.partial;
    extra["steps"] = sweep.entries.size();
    if (!sweep.entries.empty())
        extra["final"] = detail::solution_summary(sweep.entries.back().tension_t11_N,
                                                  sweep.entries.back().solution);
    extra["boundary_layer_m"] = sc.arm.fluid.boundary_layer_m;
    rep.extra = extra;
    detail::finish_report(local, rep);
    return sweep.partial ? 2 : 0;
}

/// Parse and invariant-check only; echoes the resolved parameters.
inline int cmd_validate(const CommandContext& ctx) {
    fs::create_directories(ctx.out_dir);
    RunReport rep;
    rep.command = "validate";
    detail::finish_report(ctx, rep);
    return 0;
}

}  // namespace octoarm
