#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "octoarm/loads.hpp"
#include "octoarm/rod.hpp"

namespace octoarm {

/// Everything the static solve needs besides the unknown strain field.
struct ArmScenario {
    RodGeometry geom;
    MaterialParams mat;
    TcamLayout layout;
    FluidParams fluid;
    LoadToggles toggles;
};

struct SolverSettings {
    std::size_t node_count = 201;
    double tol_strain = 1e-9;      // max-norm change threshold (mu scaled by L)
    double tol_residual = 1e-8;    // nondimensionalized equilibrium defect
    std::size_t max_iterations = 500;
    double relaxation = 0.5;       // under-relaxation factor in (0, 1]
    double tension_step_N = 0.5;
    bool warm_start = true;

    void validate() const {
        if (!(tol_strain > 0.0) || !(tol_residual > 0.0))
            throw std::invalid_argument("SolverSettings: tolerances must be positive");
        if (!(relaxation > 0.0) || relaxation > 1.0)
            throw std::invalid_argument("SolverSettings: relaxation must be in (0, 1]");
        if (max_iterations == 0)
            throw std::invalid_argument("SolverSettings: max_iterations must be >= 1");
    }
};

/// Per-node equilibrium defects, nondimensionalized by E A_ref(s)/L (force),
/// E J_ref(s)/L^2 (moment) and 1/L (volume constraint).
struct ResidualField {
    std::vector<Vec2> force;       // translational balance
    std::vector<double> moment;    // rotational balance about the origin
    std::vector<double> beta;      // incompressibility equation defect

    double max_equilibrium() const {
        double m = 0.0;
        for (const auto& v : force) m = std::max({m, std::abs(v.x), std::abs(v.y)});
        for (double v : moment) m = std::max(m, std::abs(v));
        return m;
    }
};

struct SolveDiagnostics {
    std::size_t iterations = 0;
    double final_residual = std::numeric_limits<double>::quiet_NaN();
    double final_strain_change = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
};

struct TipSummary {
    Vec2 tip_position_m;
    double tip_height_m = 0.0;
    double tilt_deg_at_L = 0.0;
    double theta_deg_at_L = 0.0;
};

struct EquilibriumSolution {
    StrainField strains;
    Configuration configuration;
    Tractions tractions;
    LoadField loads;
    ResidualField residuals;
    SolveDiagnostics diagnostics;
    TipSummary tip;
    double max_detF_error = 0.0;
};

namespace detail {

/// Internal contact force and moment obtained by integrating the equilibrium
/// equations backward from the free tip. The tip closure balances the
/// concentrated muscle pulls: f^c(L) = sum_j f^cc_j(L), and the transported
/// moment m^c + r x f^c closes against the pulls' moment about the origin.
struct InternalForces {
    std::vector<Vec2> force;     // f^c at nodes
    std::vector<double> moment;  // m^c (k component)
};

inline InternalForces integrate_internal(const Configuration& cfg, const LoadField& L,
                                         double h) {
    const std::size_t n = cfg.size();
    InternalForces out;
    out.force.assign(n, {});
    out.moment.assign(n, 0.0);

    Vec2 fc = L.tip_concentrated_force[n - 1];
    double mtilde = L.tip_concentrated_moment[n - 1];
    out.force[n - 1] = fc;
    out.moment[n - 1] = mtilde - cfg.r[n - 1].cross(fc);
    for (std::size_t i = n - 1; i-- > 0;) {
        fc += 0.5 * h * (L.distributed_force[i] + L.distributed_force[i + 1]);
        mtilde += 0.5 * h * (L.distributed_moment[i] + L.distributed_moment[i + 1]);
        // concentrated pulls at interior segment ends act on the span below them
        fc += L.tip_concentrated_force[i];
        mtilde += L.tip_concentrated_moment[i];
        out.force[i] = fc;
        out.moment[i] = mtilde - cfg.r[i].cross(fc);
    }
    return out;
}

/// d/ds consistent with the trapezoidal tail integrals: centered interior
/// difference paired with the matching local average of the density. The
/// defect vanishes identically on fields produced by the backward sweep.
inline std::vector<double> consistent_defect(const std::vector<double>& f,
                                             const std::vector<double>& g, double h) {
    const std::size_t n = f.size();
    std::vector<double> r(n);
    for (std::size_t i = 1; i + 1 < n; ++i)
        r[i] = (f[i + 1] - f[i - 1]) / (2.0 * h) +
               (g[i - 1] + 2.0 * g[i] + g[i + 1]) / 4.0;
    r[0] = (f[1] - f[0]) / h + 0.5 * (g[0] + g[1]);
    r[n - 1] = (f[n - 1] - f[n - 2]) / h + 0.5 * (g[n - 2] + g[n - 1]);
    return r;
}

}  // namespace detail

/// Equilibrium defect of a strain field: reconstructs the configuration,
/// assembles loads, forms the constitutive contact force and moment and
/// differentiates them along s against the load densities. Concentrated
/// segment-end pulls are excluded from the interior density; the strain
/// field feels them through the constitutive forces themselves.
inline ResidualField residual(const ArmScenario& sc, const StrainField& f) {
    const std::size_t n = f.size();
    const double h = sc.geom.spacing();
    const double L = sc.geom.length_m;
    const auto cfg = reconstruct(sc.geom, f);
    const auto loads = assemble_loads(cfg, f, sc.geom, sc.mat, sc.layout, sc.fluid,
                                      sc.toggles);
    const auto tr = tractions_from_strains(sc.mat, sc.geom, f);

    std::vector<double> fcx(n), fcy(n), mt(n), gx(n), gy(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 fc = (tr.normal_Pa[i] * cfg.a[i] + tr.shear_Pa[i] * cfg.b[i]) *
                        tr.area_m2[i];
        const double mc = tr.bending[i] * tr.second_moment_m4[i];
        fcx[i] = fc.x;
        fcy[i] = fc.y;
        mt[i] = mc + cfg.r[i].cross(fc);
        gx[i] = loads.distributed_force[i].x;
        gy[i] = loads.distributed_force[i].y;
        q[i] = loads.distributed_moment[i];
    }
    const auto rx = detail::consistent_defect(fcx, gx, h);
    const auto ry = detail::consistent_defect(fcy, gy, h);
    const auto rm = detail::consistent_defect(mt, q, h);

    const auto s = sc.geom.grid();
    const auto nu_s = derivative_field(f.nu, h);
    const auto mu_s = derivative_field(f.mu, h);
    const auto beta_s = derivative_field(f.beta_cs, h);

    ResidualField res;
    res.force.resize(n);
    res.moment.resize(n);
    res.beta.resize(n);
    const double E = sc.mat.young_modulus_Pa;
    for (std::size_t i = 0; i < n; ++i) {
        const double x2 = radius_at(sc.geom, s[i]);
        const double a_ref = M_PI * x2 * x2;
        const double j_ref = M_PI * x2 * x2 * x2 * x2 / 4.0;
        res.force[i] = Vec2{rx[i], ry[i]} / (E * a_ref / L);
        res.moment[i] = rm[i] / (E * j_ref / (L * L));
        double rate;
        try {
            rate = beta_rate(f.nu[i], nu_s[i], f.mu[i], mu_s[i], f.beta_cs[i], x2,
                             sc.geom.radius_slope());
        } catch (const SingularConstraintError& e) {
            throw SingularConstraintError(e.what(), static_cast<std::ptrdiff_t>(i));
        }
        res.beta[i] = (beta_s[i] - rate) * L;
    }
    return res;
}

/// Quasi-static equilibrium at one actuation level by configuration
/// iteration: reconstruct, assemble loads, integrate the internal force and
/// moment backward from the tip, invert the constitutive law, then slave the
/// cross-sectional strain to the volume-preservation condition. Under-relaxed
/// updates; the relaxation backs off when the iteration stops contracting.
inline EquilibriumSolution solve_static(const ArmScenario& sc, const SolverSettings& st,
                                        double tension_t11,
                                        const StrainField* initial_guess = nullptr) {
    ArmScenario scenario = sc;
    scenario.geom.node_count = st.node_count;
    scenario.geom.validate();
    scenario.mat.validate();
    scenario.fluid.validate();
    st.validate();
    scenario.layout.segments.at(0).tension_N[0] = tension_t11;
    scenario.layout.validate(scenario.geom);

    const std::size_t n = scenario.geom.node_count;
    const double h = scenario.geom.spacing();
    const double L = scenario.geom.length_m;
    const auto s = scenario.geom.grid();
    StrainField f = initial_guess && initial_guess->size() == n
                        ? *initial_guess
                        : StrainField::reference(n);

    double omega = st.relaxation;
    double prev_change = std::numeric_limits<double>::infinity();
    double change = prev_change;
    int growth_streak = 0;
    bool converged = false;
    double final_res = std::numeric_limits<double>::quiet_NaN();
    std::size_t it = 0;

    while (it < st.max_iterations) {
        ++it;
        const auto cfg = reconstruct(scenario.geom, f);
        const auto loads = assemble_loads(cfg, f, scenario.geom, scenario.mat,
                                          scenario.layout, scenario.fluid,
                                          scenario.toggles);
        const auto internal = detail::integrate_internal(cfg, loads, h);

        change = 0.0;
        StrainField next = f;
        for (std::size_t i = 0; i < n; ++i) {
            const double x2 = radius_at(scenario.geom, s[i]);
            const double rad = f.beta_cs[i] * x2;
            const double area = M_PI * rad * rad;
            const double jk = M_PI * rad * rad * rad * rad / 4.0;
            const double N = internal.force[i].dot(cfg.a[i]) / area;
            const double H = internal.force[i].dot(cfg.b[i]) / area;
            const double M = internal.moment[i] / jk;
            const double nu_up = 1.0 + N / (2.0 * scenario.mat.c1());
            const double eta_up = H / (2.0 * scenario.mat.c2());
            const double mu_up = M / (2.0 * scenario.mat.c3());
            change = std::max({change, std::abs(nu_up - f.nu[i]),
                               std::abs(eta_up - f.eta[i]),
                               std::abs(mu_up - f.mu[i]) * L});
            next.nu[i] = f.nu[i] + omega * (nu_up - f.nu[i]);
            next.eta[i] = f.eta[i] + omega * (eta_up - f.eta[i]);
            next.mu[i] = f.mu[i] + omega * (mu_up - f.mu[i]);
        }
        for (std::size_t i = 0; i < n; ++i)
            next.beta_cs[i] = beta_from_volume_constraint(
                next.nu[i], next.mu[i], radius_at(scenario.geom, s[i]),
                static_cast<std::ptrdiff_t>(i));
        f = std::move(next);
        change *= omega;

        if (change > prev_change) {
            if (++growth_streak >= 3) {
                omega = std::max(0.5 * omega, 0.05);
                growth_streak = 0;
            }
        } else {
            growth_streak = 0;
        }
        prev_change = change;

        if (change < st.tol_strain) {
            const auto res = residual(scenario, f);
            final_res = res.max_equilibrium();
            if (final_res < st.tol_residual) {
                converged = true;
                break;
            }
        }
    }

    EquilibriumSolution sol;
    sol.strains = f;
    sol.configuration = reconstruct(scenario.geom, f);
    sol.tractions = tractions_from_strains(scenario.mat, scenario.geom, f);
    sol.loads = assemble_loads(sol.configuration, f, scenario.geom, scenario.mat,
                               scenario.layout, scenario.fluid, scenario.toggles);
    sol.residuals = residual(scenario, f);
    if (std::isnan(final_res)) final_res = sol.residuals.max_equilibrium();
    sol.diagnostics = {it, final_res, change, converged};
    for (std::size_t i = 1; i + 1 < n; ++i)
        sol.max_detF_error = std::max(
            sol.max_detF_error,
            std::abs(det_deformation_gradient(scenario.geom, f, i) - 1.0));
    const auto& cfg = sol.configuration;
    sol.tip = {cfg.r.back(), cfg.r.back().y, cfg.tilt.back() * 180.0 / M_PI,
               cfg.theta.back() * 180.0 / M_PI};
    return sol;
}

struct SweepEntry {
    double tension_t11_N = 0.0;
    EquilibriumSolution solution;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    bool partial = false;  // at least one step failed to converge
};

/// Continuation over the actuation tension. With warm starts each converged
/// field seeds the next step; cold starts make the steps independent.
/// `abort_on_failure` stops at the first non-converged step, otherwise the
/// sweep continues and the result is marked partial.
inline SweepResult tension_sweep(const ArmScenario& sc, const SolverSettings& st,
                                 double t_low, double t_high, double step,
                                 bool abort_on_failure = false) {
    if (!(step > 0.0)) throw std::invalid_argument("tension_sweep: step must be > 0");
    if (t_high < t_low) throw std::invalid_argument("tension_sweep: empty range");
    SweepResult out;
    const auto count = static_cast<std::size_t>(std::floor((t_high - t_low) / step + 0.5)) + 1;
    std::optional<StrainField> guess;
    for (std::size_t k = 0; k < count; ++k) {
        const double t11 = std::min(t_low + static_cast<double>(k) * step, t_high);
        auto sol = solve_static(sc, st, t11, st.warm_start && guess ? &*guess : nullptr);
        if (st.warm_start) guess = sol.strains;
        const bool ok = sol.diagnostics.converged;
        out.entries.push_back({t11, std::move(sol)});
        if (!ok) {
            out.partial = true;
            if (abort_on_failure) break;
        }
    }
    return out;
}

}  // namespace octoarm
