#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace octoarm::tcam {

/// Twisted-and-coiled artificial muscle constants. Thermal mass and
/// conductivity are stored as the products C_t = m*c_p and lambda = h*A_s;
/// the individual factors are never needed.
struct TcamParams {
    double mass_kg = 0.106;
    double external_mass_kg = 0.106;       // coiling dead weight
    double fiber_length_m = 0.46;
    double ambient_length_m = 0.418;       // tabulated muscle length at ambient
    double turns = 200.0;
    double fiber_radius0_m = 3.6e-4;
    double ambient_temp_C = 23.0;
    double cte_radial_perC = 3.0e-4;       // radial thermal expansion coefficient
    double thermal_mass_JperC = 0.162;
    double resistance_ohm = 18.0;
    double axial_modulus_Pa = 4.67e8;
    double shear_modulus_Pa = 2.2e7;
    double conductivity_WperC = 0.0086;
    double viscosity_Pa_s = 1.0e5;         // Kelvin-Voigt viscosity for damping
    double gravity_mps2 = 9.81;

    // total end rotation of the fiber per unit length
    double end_rotation() const { return 2.0 * M_PI * turns / fiber_length_m; }

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("TcamParams.") + name +
                                            " must be strictly positive");
        };
        pos(mass_kg, "mass_kg");
        pos(external_mass_kg, "external_mass_kg");
        pos(fiber_length_m, "fiber_length_m");
        pos(ambient_length_m, "ambient_length_m");
        pos(turns, "turns");
        pos(fiber_radius0_m, "fiber_radius0_m");
        pos(ambient_temp_C, "ambient_temp_C");
        pos(cte_radial_perC, "cte_radial_perC");
        pos(thermal_mass_JperC, "thermal_mass_JperC");
        pos(resistance_ohm, "resistance_ohm");
        pos(axial_modulus_Pa, "axial_modulus_Pa");
        pos(shear_modulus_Pa, "shear_modulus_Pa");
        pos(conductivity_WperC, "conductivity_WperC");
        pos(viscosity_Pa_s, "viscosity_Pa_s");
        pos(gravity_mps2, "gravity_mps2");
        if (fiber_radius0_m >= fiber_length_m)
            throw std::invalid_argument("TcamParams: fiber_radius0_m must be < fiber_length_m");
        if (turns < 1.0)
            throw std::invalid_argument("TcamParams: turns must be >= 1");
    }
};

/// Temperature excess over ambient at a point in time.
struct ThermalState {
    double time_s = 0.0;
    double temp_excess_C = 0.0;
};

/// Temperature-dependent mechanical state of the coil.
struct TcamMechState {
    double bending_stiffness_Nm2 = 0.0;
    double torsion_stiffness_Nm2 = 0.0;
    double coil_angle_rad = 0.0;
    double length_m = 0.0;
    double spring_coeff_Npm = 0.0;
    double damping_coeff_Nspm = 0.0;
};

/// Coil-angle relation left its validity range (cos argument outside (0,1]
/// or bending stiffness not above torsion stiffness).
class CoilModelError : public std::runtime_error {
public:
    explicit CoilModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Time integration produced a non-finite value; carries the last good state.
class IntegrationDivergedError : public std::runtime_error {
public:
    IntegrationDivergedError(const std::string& what, ThermalState last)
        : std::runtime_error(what), last_good(last) {}
    ThermalState last_good;
};

/// Optional user-supplied conductivity curve lambda(T_excess); empty means
/// the tabulated constant.
using ConductivityFn = std::function<double(double)>;

/// Fiber radius after radial thermal expansion, affine in the temperature excess.
inline double fiber_radius(const TcamParams& p, double temp_excess_C) {
    const double r = p.fiber_radius0_m * (1.0 + p.cte_radial_perC * temp_excess_C);
    if (!(r > 0.0))
        throw std::domain_error("fiber_radius: non-positive radius at temp_excess " +
                                std::to_string(temp_excess_C));
    return r;
}

/// Rate of change of the temperature excess under Joule heating with
/// convective loss.
inline double temperature_rate(const TcamParams& p, double temp_excess_C,
                               double voltage_V, const ConductivityFn& lambda_fn = {}) {
    const double lambda = lambda_fn ? lambda_fn(temp_excess_C) : p.conductivity_WperC;
    return voltage_V * voltage_V / (p.thermal_mass_JperC * p.resistance_ohm) -
           lambda / p.thermal_mass_JperC * temp_excess_C;
}

/// Classical fourth-order fixed-step integration of the thermal balance.
/// Deterministic for a fixed dt. Returns states at t = 0, dt, ..., t_end.
inline std::vector<ThermalState> integrate_temperature(
    const TcamParams& p, const std::function<double(double)>& voltage_fn,
    double t_end_s, double dt_s, double initial_temp_excess_C = 0.0,
    const ConductivityFn& lambda_fn = {}) {
    if (!(dt_s > 0.0) || !(t_end_s >= dt_s))
        throw std::invalid_argument("integrate_temperature: need dt > 0 and t_end >= dt");
    const auto nsteps = static_cast<std::size_t>(std::llround(t_end_s / dt_s));
    std::vector<ThermalState> out;
    out.reserve(nsteps + 1);
    double T = initial_temp_excess_C;
    out.push_back({0.0, T});
    for (std::size_t i = 1; i <= nsteps; ++i) {
        const double t = static_cast<double>(i - 1) * dt_s;
        const double k1 = temperature_rate(p, T, voltage_fn(t), lambda_fn);
        const double k2 = temperature_rate(p, T + 0.5 * dt_s * k1, voltage_fn(t + 0.5 * dt_s), lambda_fn);
        const double k3 = temperature_rate(p, T + 0.5 * dt_s * k2, voltage_fn(t + 0.5 * dt_s), lambda_fn);
        const double k4 = temperature_rate(p, T + dt_s * k3, voltage_fn(t + dt_s), lambda_fn);
        T += dt_s / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(T))
            throw IntegrationDivergedError("integrate_temperature: non-finite state at t=" +
                                               std::to_string(i * dt_s),
                                           out.back());
        out.push_back({static_cast<double>(i) * dt_s, T});
    }
    return out;
}

/// Stiffnesses, coil angle, contracted length, spring and damping
/// coefficients at a given temperature excess.
inline TcamMechState mech_state(const TcamParams& p, double temp_excess_C) {
    const double r = fiber_radius(p, temp_excess_C);
    const double r4 = r * r * r * r;
    TcamMechState m;
    m.bending_stiffness_Nm2 = p.axial_modulus_Pa * (M_PI / 4.0) * r4;
    m.torsion_stiffness_Nm2 = p.shear_modulus_Pa * (M_PI / 2.0) * r4;
    const double B = m.bending_stiffness_Nm2;
    const double C = m.torsion_stiffness_Nm2;
    if (!(B > C))
        throw CoilModelError("mech_state: bending stiffness must exceed torsion stiffness");
    const double load = p.external_mass_kg * p.gravity_mps2;
    const double cos_phi =
        1.0 - (p.end_rotation() * B * C / (std::sqrt(B) * load) - 2.0 * C) / (B - C);
    if (!(cos_phi > 0.0) || cos_phi > 1.0)
        throw CoilModelError("mech_state: coil-angle cosine " + std::to_string(cos_phi) +
                             " outside (0, 1] at temp_excess " + std::to_string(temp_excess_C));
    m.coil_angle_rad = std::acos(cos_phi);
    m.length_m = p.fiber_length_m * cos_phi;
    m.spring_coeff_Npm = load / m.length_m;
    m.damping_coeff_Nspm = p.viscosity_Pa_s * (M_PI * r * r) / p.ambient_length_m;
    return m;
}

/// Linearized tension-per-degree coefficient taken at a reference
/// temperature excess: k0 * (L0 - load/k(T*)) / T*.
inline double linearization_coefficient(const TcamParams& p, double ref_temp_excess_C) {
    if (!(ref_temp_excess_C > 0.0))
        throw std::invalid_argument("linearization_coefficient: reference temp excess must be > 0");
    const double load = p.external_mass_kg * p.gravity_mps2;
    const double k0 = mech_state(p, 0.0).spring_coeff_Npm;
    const double k_ref = mech_state(p, ref_temp_excess_C).spring_coeff_Npm;
    const double rest_length = load / k0;
    const double contraction = rest_length - load / k_ref;
    return k0 * contraction / ref_temp_excess_C;
}

/// Muscle tension at a temperature excess, linear in the excess.
inline double tension(const TcamParams&, double c_lin_NperC, double temp_excess_C) {
    return c_lin_NperC * temp_excess_C;
}

/// Contraction transient d(t) of the mass-spring-damper approximation,
/// driven by a uniformly sampled temperature history. Fourth-order one-step
/// scheme on the first-order form; the forcing is interpolated linearly
/// between samples. `damping_override` replaces the temperature-dependent
/// damping coefficient when set.
inline std::vector<double> contraction_response(
    const TcamParams& p, double c_lin_NperC, const std::vector<double>& temp_history_C,
    double dt_s, std::optional<double> damping_override = {}) {
    if (temp_history_C.empty()) return {};
    const double k0 = mech_state(p, 0.0).spring_coeff_Npm;
    std::vector<double> d(temp_history_C.size(), 0.0);
    double x = 0.0, v = 0.0;
    auto temp_at = [&](std::size_t i, double frac) {
        if (i + 1 >= temp_history_C.size()) return temp_history_C.back();
        return (1.0 - frac) * temp_history_C[i] + frac * temp_history_C[i + 1];
    };
    auto accel = [&](double T, double xx, double vv) {
        const double b = damping_override ? *damping_override
                                          : mech_state(p, T).damping_coeff_Nspm;
        return (c_lin_NperC * T - b * vv - k0 * xx) / p.mass_kg;
    };
    for (std::size_t i = 0; i + 1 < temp_history_C.size(); ++i) {
        const double T0 = temp_at(i, 0.0), Tm = temp_at(i, 0.5), T1 = temp_at(i, 1.0);
        const double k1x = v, k1v = accel(T0, x, v);
        const double k2x = v + 0.5 * dt_s * k1v, k2v = accel(Tm, x + 0.5 * dt_s * k1x, v + 0.5 * dt_s * k1v);
        const double k3x = v + 0.5 * dt_s * k2v, k3v = accel(Tm, x + 0.5 * dt_s * k2x, v + 0.5 * dt_s * k2v);
        const double k4x = v + dt_s * k3v, k4v = accel(T1, x + dt_s * k3x, v + dt_s * k3v);
        x += dt_s / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt_s / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (!std::isfinite(x) || !std::isfinite(v))
            throw IntegrationDivergedError("contraction_response: non-finite state",
                                           {static_cast<double>(i) * dt_s, temp_history_C[i]});
        d[i + 1] = x;
    }
    return d;
}

}  // namespace octoarm::tcam
