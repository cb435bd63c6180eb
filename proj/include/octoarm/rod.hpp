#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "octoarm/grid.hpp"
#include "octoarm/vec2.hpp"

namespace octoarm {

/// Truncated-cone reference shape of the arm, discretized on a uniform grid.
struct RodGeometry {
    double length_m = 0.418;
    double r_max_m = 0.015;
    double r_min_m = 0.004;
    std::size_t node_count = 201;

    double spacing() const { return length_m / static_cast<double>(node_count - 1); }
    std::vector<double> grid() const { return uniform_grid(length_m, node_count); }
    double radius_slope() const { return (r_min_m - r_max_m) / length_m; }

    void validate() const {
        if (!(r_max_m >= r_min_m) || !(r_min_m > 0.0))
            throw std::invalid_argument("RodGeometry: need r_max >= r_min > 0");
        if (!(length_m > 0.0))
            throw std::invalid_argument("RodGeometry: length must be positive");
        if (node_count < 3)
            throw std::invalid_argument("RodGeometry: need at least 3 nodes");
    }
};

/// Reference radius at arc length s, affine from r_max at the base to r_min
/// at the tip.
inline double radius_at(const RodGeometry& g, double s) {
    if (s < 0.0 || s > g.length_m)
        throw std::domain_error("radius_at: s outside [0, L]");
    return g.radius_slope() * s + g.r_max_m;
}

/// Hyperelastic constants of the arm material.
struct MaterialParams {
    double young_modulus_Pa = 10e6;
    double poisson_ratio = 0.5;
    double density_kgpm3 = 1100.0;
    double gravity_mps2 = 9.81;

    double shear_modulus_Pa() const {
        return young_modulus_Pa / (2.0 * (1.0 + poisson_ratio));
    }
    // stiffness coefficients of the quadratic strain energy
    double c1() const { return young_modulus_Pa; }
    double c2() const { return shear_modulus_Pa(); }
    double c3() const { return young_modulus_Pa; }

    void validate() const {
        if (!(young_modulus_Pa > 0.0))
            throw std::invalid_argument("MaterialParams: Young modulus must be positive");
        if (poisson_ratio < 0.0 || poisson_ratio > 0.5)
            throw std::invalid_argument("MaterialParams: Poisson ratio outside [0, 0.5]");
        if (!(density_kgpm3 > 0.0))
            throw std::invalid_argument("MaterialParams: density must be positive");
    }
};

/// Bulk strains (nu, eta, mu) and the cross-sectional normal strain beta on
/// the grid. The stress-free reference state is nu=1, eta=0, mu=0, beta=1.
struct StrainField {
    std::vector<double> nu;       // normal bulk strain
    std::vector<double> eta;      // shear bulk strain
    std::vector<double> mu;       // bending strain, 1/m
    std::vector<double> beta_cs;  // cross-sectional normal strain

    std::size_t size() const { return nu.size(); }

    static StrainField reference(std::size_t n) {
        StrainField f;
        f.nu.assign(n, 1.0);
        f.eta.assign(n, 0.0);
        f.mu.assign(n, 0.0);
        f.beta_cs.assign(n, 1.0);
        return f;
    }
};

/// Reconstructed arm configuration: centerline, directors and tangents.
struct Configuration {
    std::vector<Vec2> r;          // centerline, global frame
    std::vector<double> theta;    // director angle
    std::vector<double> r_a;      // centerline coordinates in the body frame
    std::vector<double> r_b;
    std::vector<Vec2> a;          // directors
    std::vector<Vec2> b;
    std::vector<Vec2> t;          // tangent r_s = nu a + eta b
    std::vector<double> alpha;    // tangent orientation
    std::vector<double> tilt;     // alpha - theta

    std::size_t size() const { return r.size(); }
};

/// Constitutive tractions and the deformed section properties they act on.
struct Tractions {
    std::vector<double> normal_Pa;   // N, conjugate to nu
    std::vector<double> shear_Pa;    // H, conjugate to eta
    std::vector<double> bending;     // M, conjugate to mu (Pa/m scale)
    std::vector<double> area_m2;     // pi (beta X2)^2
    std::vector<double> second_moment_m4;  // pi (beta X2)^4 / 4
};

/// The incompressibility constraint became locally singular; the solve is
/// diverging rather than describing physics.
class SingularConstraintError : public std::runtime_error {
public:
    explicit SingularConstraintError(const std::string& what, std::ptrdiff_t node = -1)
        : std::runtime_error(what), node_index(node) {}
    std::ptrdiff_t node_index;
};

/// Integrates theta_s = mu and the body-frame centerline equations
/// r^a_s = nu + mu r^b, r^b_s = eta - mu r^a from the clamped base
/// (r(0) = 0, theta(0) = 0) with a fourth-order one-step scheme, then maps
/// to the global frame through the directors.
inline Configuration reconstruct(const RodGeometry& geom, const StrainField& f) {
    const std::size_t n = f.size();
    assert(n == geom.node_count);
    const double h = geom.spacing();
    const auto num = midpoint_interp(f.nu);
    const auto etam = midpoint_interp(f.eta);
    const auto mum = midpoint_interp(f.mu);

    Configuration c;
    c.theta.assign(n, 0.0);
    c.r_a.assign(n, 0.0);
    c.r_b.assign(n, 0.0);
    struct State { double th, ra, rb; };
    auto rhs = [](double nu_v, double eta_v, double mu_v, State s) {
        return State{mu_v, nu_v + mu_v * s.rb, eta_v - mu_v * s.ra};
    };
    State y{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const State k1 = rhs(f.nu[i], f.eta[i], f.mu[i], y);
        const State k2 = rhs(num[i], etam[i], mum[i],
                             {y.th + 0.5 * h * k1.th, y.ra + 0.5 * h * k1.ra, y.rb + 0.5 * h * k1.rb});
        const State k3 = rhs(num[i], etam[i], mum[i],
                             {y.th + 0.5 * h * k2.th, y.ra + 0.5 * h * k2.ra, y.rb + 0.5 * h * k2.rb});
        const State k4 = rhs(f.nu[i + 1], f.eta[i + 1], f.mu[i + 1],
                             {y.th + h * k3.th, y.ra + h * k3.ra, y.rb + h * k3.rb});
        y.th += h / 6.0 * (k1.th + 2.0 * k2.th + 2.0 * k3.th + k4.th);
        y.ra += h / 6.0 * (k1.ra + 2.0 * k2.ra + 2.0 * k3.ra + k4.ra);
        y.rb += h / 6.0 * (k1.rb + 2.0 * k2.rb + 2.0 * k3.rb + k4.rb);
        c.theta[i + 1] = y.th;
        c.r_a[i + 1] = y.ra;
        c.r_b[i + 1] = y.rb;
    }

    c.r.resize(n);
    c.a.resize(n);
    c.b.resize(n);
    c.t.resize(n);
    c.alpha.resize(n);
    c.tilt.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ct = std::cos(c.theta[i]), st = std::sin(c.theta[i]);
        c.a[i] = {ct, st};
        c.b[i] = {-st, ct};
        c.r[i] = c.r_a[i] * c.a[i] + c.r_b[i] * c.b[i];
        c.t[i] = f.nu[i] * c.a[i] + f.eta[i] * c.b[i];
        c.tilt[i] = std::atan2(f.eta[i], f.nu[i]);
        c.alpha[i] = c.theta[i] + c.tilt[i];
    }
    return c;
}

/// N = 2 C1 (nu - 1), H = 2 C2 eta, M = 2 C3 mu, with the deformed section
/// area and second moment from beta.
inline Tractions tractions_from_strains(const MaterialParams& m, const RodGeometry& geom,
                                        const StrainField& f) {
    const std::size_t n = f.size();
    Tractions t;
    t.normal_Pa.resize(n);
    t.shear_Pa.resize(n);
    t.bending.resize(n);
    t.area_m2.resize(n);
    t.second_moment_m4.resize(n);
    const auto s = geom.grid();
    for (std::size_t i = 0; i < n; ++i) {
        t.normal_Pa[i] = 2.0 * m.c1() * (f.nu[i] - 1.0);
        t.shear_Pa[i] = 2.0 * m.c2() * f.eta[i];
        t.bending[i] = 2.0 * m.c3() * f.mu[i];
        const double rad = f.beta_cs[i] * radius_at(geom, s[i]);
        t.area_m2[i] = M_PI * rad * rad;
        t.second_moment_m4[i] = M_PI * rad * rad * rad * rad / 4.0;
    }
    return t;
}

struct BulkStrains {
    std::vector<double> nu, eta, mu;
};

/// Exact inverse of the linear constitutive map.
inline BulkStrains strains_from_tractions(const MaterialParams& m, const Tractions& t) {
    const std::size_t n = t.normal_Pa.size();
    BulkStrains f;
    f.nu.resize(n);
    f.eta.resize(n);
    f.mu.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.nu[i] = 1.0 + t.normal_Pa[i] / (2.0 * m.c1());
        f.eta[i] = t.shear_Pa[i] / (2.0 * m.c2());
        f.mu[i] = t.bending[i] / (2.0 * m.c3());
    }
    return f;
}

/// Quadratic strain energy density, minimized at the stress-free reference.
inline double strain_energy(const MaterialParams& m, double nu, double eta, double mu) {
    return m.c1() * (nu - 1.0) * (nu - 1.0) + m.c2() * eta * eta + m.c3() * mu * mu;
}

inline std::vector<double> strain_energy(const MaterialParams& m, const StrainField& f) {
    std::vector<double> psi(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        psi[i] = strain_energy(m, f.nu[i], f.eta[i], f.mu[i]);
    return psi;
}

/// Right-hand side of the incompressibility equation
/// beta_s = -beta (nu_s - beta X2_s mu - beta X2 mu_s) / (nu - 2 beta X2 mu).
inline double beta_rate(double nu, double nu_s, double mu, double mu_s, double beta,
                        double x2, double x2_s, double denom_floor = 1e-9) {
    const double denom = nu - 2.0 * beta * x2 * mu;
    if (std::abs(denom) < denom_floor)
        throw SingularConstraintError("beta_rate: constraint denominator " +
                                      std::to_string(denom) + " below floor");
    return -beta * (nu_s - beta * x2_s * mu - beta * x2 * mu_s) / denom;
}

/// Pointwise root of the volume-preservation condition
/// beta (nu - beta X2 mu) = 1, the branch that continues beta = 1/nu at
/// mu = 0. The incompressibility ODE above is the exact s-derivative of this
/// condition, so the rooted field satisfies it identically.
inline double beta_from_volume_constraint(double nu, double mu, double x2,
                                          std::ptrdiff_t node = -1) {
    const double disc = nu * nu - 4.0 * x2 * mu;
    if (disc < 1e-18)
        throw SingularConstraintError(
            "volume constraint has no admissible root (nu^2 - 4 X2 mu = " +
                std::to_string(disc) + ")",
            node);
    return 2.0 / (nu + std::sqrt(disc));
}

/// det F of the section map x = r + beta X2 b, assembled in the director
/// frame. The off-diagonal shear entry carries the beta_s and X2_s terms; it
/// multiplies a zero in the determinant, so the value reduces to
/// beta (nu - beta X2 mu).
inline double det_deformation_gradient(const RodGeometry& geom, const StrainField& f,
                                       std::size_t s_index) {
    const std::size_t n = f.size();
    if (s_index < 1 || s_index + 1 >= n)
        throw std::domain_error("det_deformation_gradient: interior nodes only");
    const double h = geom.spacing();
    const double s = static_cast<double>(s_index) * h;
    const double x2 = radius_at(geom, s);
    const double beta_s = (f.beta_cs[s_index + 1] - f.beta_cs[s_index - 1]) / (2.0 * h);
    const double f11 = f.nu[s_index] - f.beta_cs[s_index] * x2 * f.mu[s_index];
    const double f21 = f.eta[s_index] + beta_s * x2 + f.beta_cs[s_index] * geom.radius_slope();
    const double f12 = 0.0;
    const double f22 = f.beta_cs[s_index];
    return f11 * f22 - f12 * f21;
}

}  // namespace octoarm
