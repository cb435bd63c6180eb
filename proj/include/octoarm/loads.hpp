#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "octoarm/grid.hpp"
#include "octoarm/rod.hpp"
#include "octoarm/vec2.hpp"

namespace octoarm {

/// One independently actuated section of the arm with its two muscles.
/// Muscle j=1 runs above the centerline (+b side), j=2 mirrored below.
struct TcamSegment {
    double length_m = 0.418;
    double a_m = 0.012;   // offset from the centerline at the segment start
    double b_m = 0.001;   // offset at the segment end
    std::array<double, 2> tension_N{0.0, 0.0};
};

struct TcamLayout {
    std::vector<TcamSegment> segments{TcamSegment{}};

    void validate(const RodGeometry& geom) const {
        double total = 0.0;
        double start = 0.0;
        for (const auto& seg : segments) {
            if (!(seg.a_m > seg.b_m) || !(seg.b_m > 0.0))
                throw std::invalid_argument("TcamLayout: need a > b > 0 per segment");
            if (seg.tension_N[0] < 0.0 || seg.tension_N[1] < 0.0)
                throw std::invalid_argument("TcamLayout: tensions must be >= 0");
            // muscle must stay inside the arm; both offsets and radius are
            // affine in s, so the endpoints decide
            if (seg.a_m > radius_at(geom, start) ||
                seg.b_m > radius_at(geom, std::min(start + seg.length_m, geom.length_m)))
                throw std::invalid_argument("TcamLayout: muscle offset exceeds arm radius");
            total += seg.length_m;
            start += seg.length_m;
        }
        if (std::abs(total - geom.length_m) > 1e-9 * geom.length_m)
            throw std::invalid_argument("TcamLayout: segment lengths must sum to the arm length");
    }

    /// Nodes [first, last] covered by segment k; segment boundaries must
    /// coincide with grid nodes.
    std::pair<std::size_t, std::size_t> node_range(const RodGeometry& geom,
                                                   std::size_t k) const {
        const double h = geom.spacing();
        double start = 0.0;
        for (std::size_t i = 0; i < k; ++i) start += segments[i].length_m;
        const double end = start + segments[k].length_m;
        const double fi = start / h, li = end / h;
        const auto first = static_cast<std::size_t>(std::llround(fi));
        const auto last = static_cast<std::size_t>(std::llround(li));
        if (std::abs(fi - static_cast<double>(first)) > 1e-6 ||
            std::abs(li - static_cast<double>(last)) > 1e-6)
            throw std::invalid_argument("TcamLayout: segment boundary not on a grid node");
        return {first, last};
    }
};

/// Offset of muscle j of segment k from the undeformed centerline at local
/// arc length s measured from the segment start.
inline double tcam_offset(const TcamLayout& layout, std::size_t k, int j, double s_local) {
    const auto& seg = layout.segments.at(k);
    if (s_local < 0.0 || s_local > seg.length_m)
        throw std::domain_error("tcam_offset: s outside the segment");
    const double side = (j == 1) ? 1.0 : -1.0;
    return side * ((seg.b_m - seg.a_m) / seg.length_m * s_local + seg.a_m);
}

enum class HydrostaticMode { cancel, buoyant };

struct FluidParams {
    double water_density_kgpm3 = 998.0;
    double dynamic_viscosity_Pas = 1.002e-3;
    double free_stream_mps = 0.2;        // along e1
    double boundary_layer_m = 0.05;
    HydrostaticMode hydrostatic_mode = HydrostaticMode::cancel;
    double reference_depth_m = 1.0;      // echoed in reports; no net force at uniform depth

    void validate() const {
        if (!(water_density_kgpm3 > 0.0) || !(dynamic_viscosity_Pas > 0.0) ||
            !(boundary_layer_m > 0.0))
            throw std::invalid_argument("FluidParams: density, viscosity, boundary layer must be > 0");
        if (free_stream_mps < 0.0)
            throw std::invalid_argument("FluidParams: free stream speed must be >= 0");
        if (reference_depth_m < 0.0)
            throw std::invalid_argument("FluidParams: reference depth must be >= 0");
    }
};

/// Muscle curve r^c = r + y beta b on its segment's node range, with
/// tangents and tangent rates by differencing on the same grid as the rod.
struct TcamCurve {
    std::size_t first = 0;               // grid index of the segment start
    std::vector<Vec2> position;
    std::vector<Vec2> tangent;           // d r^c / ds
    std::vector<Vec2> tangent_rate;      // d t^c / ds
};

inline TcamCurve tcam_curve(const Configuration& cfg, const StrainField& f,
                            const TcamLayout& layout, const RodGeometry& geom,
                            std::size_t k, int j) {
    const auto [first, last] = layout.node_range(geom, k);
    const double h = geom.spacing();
    const std::size_t m = last - first + 1;
    TcamCurve c;
    c.first = first;
    c.position.resize(m);
    std::vector<double> px(m), py(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double y = tcam_offset(layout, k, j, static_cast<double>(i) * h);
        const std::size_t gi = first + i;
        c.position[i] = cfg.r[gi] + y * f.beta_cs[gi] * cfg.b[gi];
        px[i] = c.position[i].x;
        py[i] = c.position[i].y;
    }
    const auto tx = derivative_field(px, h), ty = derivative_field(py, h);
    const auto rx = derivative_field(tx, h), ry = derivative_field(ty, h);
    c.tangent.resize(m);
    c.tangent_rate.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        c.tangent[i] = {tx[i], ty[i]};
        c.tangent_rate[i] = {rx[i], ry[i]};
    }
    return c;
}

/// Concentrated muscle pull at the segment end, -T t^c(L_k).
inline Vec2 tcam_concentrated_force(Vec2 tangent_at_end, double tension_N) {
    assert(tension_N >= 0.0);
    return -tension_N * tangent_at_end;
}

/// Distributed muscle force density f^cd = T d(t^c)/ds on the segment nodes,
/// and the tail moment integrals m^cd(s) = trapz of r^c x f^cd over [s, L_k].
struct TcamDistributed {
    std::size_t first = 0;
    std::vector<Vec2> force;             // per unit reference length
    std::vector<double> moment_tail;     // about the global origin; zero at the segment end
};

inline TcamDistributed tcam_distributed(const TcamCurve& c, double tension_N, double h) {
    TcamDistributed d;
    d.first = c.first;
    const std::size_t m = c.position.size();
    d.force.resize(m);
    std::vector<double> density(m);
    for (std::size_t i = 0; i < m; ++i) {
        d.force[i] = tension_N * c.tangent_rate[i];
        density[i] = c.position[i].cross(d.force[i]);
    }
    d.moment_tail = trapz_from_tip(density, h);
    return d;
}

/// Fluid force densities per unit reference length, split by mechanism.
/// The free-stream direction is a parameter so the whole field is
/// equivariant under rigid rotations of flow and configuration together.
struct FluidForces {
    std::vector<Vec2> viscous;
    std::vector<Vec2> tangential_dyn;
    std::vector<Vec2> normal_dyn;
    std::vector<Vec2> hydrostatic_ventral;
    std::vector<Vec2> hydrostatic_dorsal;

    Vec2 total(std::size_t i) const {
        return viscous[i] + tangential_dyn[i] + normal_dyn[i] +
               hydrostatic_ventral[i] + hydrostatic_dorsal[i];
    }
};

/// Boundary-layer friction plus the control-volume dynamic forces on the
/// ventral (windward) surface. The windward side is identified per node from
/// the sign of the normal inflow, so v_n,in >= 0 on the ventral face by
/// construction; the normal dynamic push acts through the arm along the
/// flow's normal component and the tangential reaction opposes the momentum
/// gained by the deflected flow. Hydrostatic terms follow the chosen mode:
/// `cancel` treats the opposite faces as equal and opposite at uniform
/// depth, `buoyant` keeps the net Archimedes density.
inline FluidForces fluid_forces(const Configuration& cfg, const StrainField& f,
                                const RodGeometry& geom, const FluidParams& fl,
                                Vec2 free_stream, double gravity_mps2 = 9.81) {
    const std::size_t n = cfg.size();
    const auto s = geom.grid();
    FluidForces out;
    out.viscous.assign(n, {});
    out.tangential_dyn.assign(n, {});
    out.normal_dyn.assign(n, {});
    out.hydrostatic_ventral.assign(n, {});
    out.hydrostatic_dorsal.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        const double x2 = radius_at(geom, s[i]);
        const double width = f.beta_cs[i] * x2;
        const Vec2 ut = cfg.t[i].normalized();
        const Vec2 un = ut.perp();
        const double vt = free_stream.dot(ut);
        const double vn_raw = free_stream.dot(un);
        const double vn_in = std::abs(vn_raw);
        out.viscous[i] =
            -2.0 * M_PI * x2 * f.beta_cs[i] * fl.dynamic_viscosity_Pas * vt /
            fl.boundary_layer_m * ut;
        if (vn_in > 0.0) {
            const double coeff = M_PI * fl.water_density_kgpm3 * width;
            out.tangential_dyn[i] = -coeff * (vn_in * vn_in + 2.0 * vt * vn_in) * ut;
            const Vec2 flow_normal = (vn_raw > 0.0 ? un : -un);
            out.normal_dyn[i] = coeff * vn_in * vn_in * flow_normal;
        }
        if (fl.hydrostatic_mode == HydrostaticMode::buoyant) {
            // net pressure difference across the section at depth
            out.hydrostatic_ventral[i] =
                Vec2{0.0, fl.water_density_kgpm3 * gravity_mps2 * M_PI * width * width};
        }
    }
    return out;
}

inline FluidForces fluid_forces(const Configuration& cfg, const StrainField& f,
                                const RodGeometry& geom, const FluidParams& fl) {
    return fluid_forces(cfg, f, geom, fl, {fl.free_stream_mps, 0.0});
}

/// Weight density w(s) = -pi rho g nu (beta X2)^2 e2 of the deformed arm.
inline std::vector<Vec2> weight_density(const StrainField& f, const RodGeometry& geom,
                                        const MaterialParams& mat) {
    const std::size_t n = f.size();
    const auto s = geom.grid();
    std::vector<Vec2> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rad = f.beta_cs[i] * radius_at(geom, s[i]);
        w[i] = {0.0, -M_PI * mat.density_kgpm3 * mat.gravity_mps2 * f.nu[i] * rad * rad};
    }
    return w;
}

/// Weight of the arm segment [s_i, L] by trapezoidal quadrature.
inline Vec2 segment_weight(const StrainField& f, const RodGeometry& geom,
                           const MaterialParams& mat, std::size_t s_index) {
    const auto w = weight_density(f, geom, mat);
    std::vector<double> wy(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) wy[i] = w[i].y;
    const auto tail = trapz_from_tip(wy, geom.spacing());
    return {0.0, tail[s_index]};
}

/// Assembled external loading: distributed force and moment-about-origin
/// densities on the grid plus concentrated muscle pulls at segment-end nodes.
struct LoadField {
    std::vector<Vec2> distributed_force;       // f^cd + f^ex + w
    std::vector<double> distributed_moment;    // r^c x f^cd + r x f^ex + r x w
    std::vector<Vec2> tip_concentrated_force;  // nonzero only at segment ends
    std::vector<double> tip_concentrated_moment;  // r^c x f^cc at the same nodes
};

struct LoadToggles {
    bool gravity = true;
    bool fluid = true;
};

inline LoadField assemble_loads(const Configuration& cfg, const StrainField& f,
                                const RodGeometry& geom, const MaterialParams& mat,
                                const TcamLayout& layout, const FluidParams& fl,
                                LoadToggles toggles = {},
                                std::optional<Vec2> stream_override = {}) {
    const Vec2 free_stream =
        stream_override.value_or(Vec2{fl.free_stream_mps, 0.0});
    const std::size_t n = cfg.size();
    const double h = geom.spacing();
    LoadField L;
    L.distributed_force.assign(n, {});
    L.distributed_moment.assign(n, 0.0);
    L.tip_concentrated_force.assign(n, {});
    L.tip_concentrated_moment.assign(n, 0.0);

    for (std::size_t k = 0; k < layout.segments.size(); ++k) {
        for (int j = 1; j <= 2; ++j) {
            const double T = layout.segments[k].tension_N[j - 1];
            if (T == 0.0) continue;
            const auto curve = tcam_curve(cfg, f, layout, geom, k, j);
            const auto dist = tcam_distributed(curve, T, h);
            const std::size_t m = curve.position.size();
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t gi = curve.first + i;
                L.distributed_force[gi] += dist.force[i];
                L.distributed_moment[gi] += curve.position[i].cross(dist.force[i]);
            }
            const std::size_t end = curve.first + m - 1;
            const Vec2 fcc = tcam_concentrated_force(curve.tangent.back(), T);
            L.tip_concentrated_force[end] += fcc;
            L.tip_concentrated_moment[end] += curve.position.back().cross(fcc);
        }
    }

    if (toggles.gravity) {
        const auto w = weight_density(f, geom, mat);
        for (std::size_t i = 0; i < n; ++i) {
            L.distributed_force[i] += w[i];
            L.distributed_moment[i] += cfg.r[i].cross(w[i]);
        }
    }

    if (toggles.fluid) {
        const auto ff = fluid_forces(cfg, f, geom, fl, free_stream, mat.gravity_mps2);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 fe = ff.total(i);
            L.distributed_force[i] += fe;
            L.distributed_moment[i] += cfg.r[i].cross(fe);
        }
    }
    return L;
}

}  // namespace octoarm
