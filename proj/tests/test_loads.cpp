#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "octoarm/loads.hpp"

using namespace octoarm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RodGeometry table_geom(std::size_t n = 201) {
    RodGeometry g;
    g.node_count = n;
    return g;
}

Configuration rotated_copy(const Configuration& c, double phi) {
    Configuration out = c;
    for (std::size_t i = 0; i < c.size(); ++i) {
        out.r[i] = rotate(c.r[i], phi);
        out.theta[i] = c.theta[i] + phi;
        out.a[i] = rotate(c.a[i], phi);
        out.b[i] = rotate(c.b[i], phi);
        out.t[i] = rotate(c.t[i], phi);
        out.alpha[i] = c.alpha[i] + phi;
    }
    return out;
}

StrainField bent_field(const RodGeometry& g) {
    auto f = StrainField::reference(g.node_count);
    const auto s = g.grid();
    for (std::size_t i = 0; i < g.node_count; ++i) {
        const double x = s[i] / g.length_m;
        f.nu[i] = 1.0 - 0.001 * x;
        f.eta[i] = 0.002 * x;
        f.mu[i] = 3.0 * std::sin(M_PI * x) + 0.5;
        f.beta_cs[i] = beta_from_volume_constraint(f.nu[i], f.mu[i], radius_at(g, s[i]));
    }
    return f;
}

}  // namespace

TEST_CASE("muscle offsets from the tabulated layout") {
    const TcamLayout layout;
    CHECK(tcam_offset(layout, 0, 1, 0.0) == 0.012);
    CHECK(tcam_offset(layout, 0, 2, 0.0) == -0.012);
    CHECK_THAT(tcam_offset(layout, 0, 1, layout.segments[0].length_m), WithinRel(0.001, 1e-12));
    CHECK_THAT(tcam_offset(layout, 0, 2, layout.segments[0].length_m), WithinRel(-0.001, 1e-12));
    CHECK_THROWS_AS(tcam_offset(layout, 0, 1, 1.0), std::domain_error);
}

TEST_CASE("layout validation") {
    const auto g = table_geom();
    TcamLayout layout;
    layout.validate(g);

    TcamLayout bad = layout;
    bad.segments[0].a_m = 0.02;  // outside the base radius
    CHECK_THROWS_AS(bad.validate(g), std::invalid_argument);

    bad = layout;
    bad.segments[0].length_m = 0.3;
    CHECK_THROWS_AS(bad.validate(g), std::invalid_argument);

    bad = layout;
    bad.segments[0].tension_N[0] = -1.0;
    CHECK_THROWS_AS(bad.validate(g), std::invalid_argument);
}

TEST_CASE("muscle curve on the straight reference") {
    const auto g = table_geom();
    const auto f = StrainField::reference(g.node_count);
    const auto cfg = reconstruct(g, f);
    const TcamLayout layout;
    const auto c = tcam_curve(cfg, f, layout, g, 0, 1);
    const auto s = g.grid();
    const double slope = (layout.segments[0].b_m - layout.segments[0].a_m) /
                         layout.segments[0].length_m;
    for (std::size_t i = 0; i < g.node_count; i += 40) {
        CHECK_THAT(c.position[i].x, WithinAbs(s[i], 1e-14));
        CHECK_THAT(c.position[i].y, WithinAbs(0.012 + slope * s[i], 1e-14));
        // differencing affine data is exact
        CHECK_THAT(c.tangent[i].x, WithinAbs(1.0, 1e-12));
        CHECK_THAT(c.tangent[i].y, WithinAbs(slope, 1e-12));
        CHECK_THAT(c.tangent_rate[i].norm(), WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("muscle curve tangent matches the analytic arc derivative") {
    const auto g = table_geom();
    auto f = StrainField::reference(g.node_count);
    const double kappa = M_PI / (2.0 * g.length_m);
    for (auto& m : f.mu) m = kappa;
    const auto cfg = reconstruct(g, f);
    const TcamLayout layout;
    const auto c = tcam_curve(cfg, f, layout, g, 0, 1);
    // with beta = 1:  d r^c / ds = (1 - y mu) a + y' b
    const auto s = g.grid();
    const double slope = (layout.segments[0].b_m - layout.segments[0].a_m) /
                         layout.segments[0].length_m;
    double max_err = 0.0;
    for (std::size_t i = 1; i + 1 < g.node_count; ++i) {
        const double y = tcam_offset(layout, 0, 1, s[i]);
        const Vec2 exact = (1.0 - y * kappa) * cfg.a[i] + slope * cfg.b[i];
        max_err = std::max(max_err, (c.tangent[i] - exact).norm());
    }
    CHECK(max_err < 1e-4);  // second-order differencing on a smooth curve
}

TEST_CASE("concentrated muscle pull") {
    const auto g = table_geom();
    const auto f = StrainField::reference(g.node_count);
    const auto cfg = reconstruct(g, f);
    const TcamLayout layout;

    CHECK(tcam_concentrated_force({1.0, 0.0}, 0.0).norm() == 0.0);

    const auto c1 = tcam_curve(cfg, f, layout, g, 0, 1);
    const Vec2 F1 = tcam_concentrated_force(c1.tangent.back(), 20.0);
    const double slope = (layout.segments[0].b_m - layout.segments[0].a_m) /
                         layout.segments[0].length_m;
    CHECK_THAT(F1.x, WithinRel(-20.0, 1e-9));
    CHECK_THAT(F1.y, WithinRel(-20.0 * slope, 1e-9));

    // the mirror muscle under the mirror-symmetric configuration
    const auto c2 = tcam_curve(cfg, f, layout, g, 0, 2);
    const Vec2 F2 = tcam_concentrated_force(c2.tangent.back(), 20.0);
    CHECK_THAT(F2.x, WithinRel(F1.x, 1e-12));
    CHECK_THAT(F2.y, WithinRel(-F1.y, 1e-12));
}

TEST_CASE("distributed muscle force") {
    const auto g = table_geom();
    const auto f = StrainField::reference(g.node_count);
    const auto cfg = reconstruct(g, f);
    const TcamLayout layout;
    const double h = g.spacing();

    SECTION("straight reference carries no distributed force") {
        const auto c = tcam_curve(cfg, f, layout, g, 0, 1);
        const auto d = tcam_distributed(c, 20.0, h);
        for (std::size_t i = 0; i < d.force.size(); i += 40)
            CHECK_THAT(d.force[i].norm(), WithinAbs(0.0, 1e-7));
        CHECK_THAT(d.moment_tail.front(), WithinAbs(0.0, 1e-8));
        CHECK(d.moment_tail.back() == 0.0);
    }

    SECTION("zero tension gives zero fields") {
        const auto c = tcam_curve(cfg, f, layout, g, 0, 1);
        const auto d = tcam_distributed(c, 0.0, h);
        for (const auto& v : d.force) CHECK(v.norm() == 0.0);
        for (const double m : d.moment_tail) CHECK(m == 0.0);
    }

    SECTION("moment quadrature converges at second order") {
        auto arc = [&](std::size_t n) {
            auto gg = table_geom(n);
            auto ff = StrainField::reference(n);
            const double kappa = M_PI / (2.0 * gg.length_m);
            for (auto& m : ff.mu) m = kappa;
            const auto cc = reconstruct(gg, ff);
            const auto curve = tcam_curve(cc, ff, layout, gg, 0, 1);
            return tcam_distributed(curve, 20.0, gg.spacing()).moment_tail.front();
        };
        const double dense = arc(3201);
        const double e1 = std::abs(arc(101) - dense);
        const double e2 = std::abs(arc(201) - dense);
        CHECK(e1 > 0.0);
        const double order = std::log2(e1 / e2);
        CHECK(order > 1.6);
        CHECK(order < 2.7);
    }
}

TEST_CASE("fluid forces") {
    const auto g = table_geom();
    const auto f = StrainField::reference(g.node_count);
    const auto cfg = reconstruct(g, f);
    FluidParams fl;

    SECTION("still water, cancel mode: no force at all") {
        fl.free_stream_mps = 0.0;
        const auto ff = fluid_forces(cfg, f, g, fl);
        for (std::size_t i = 0; i < g.node_count; i += 40) {
            CHECK(ff.total(i).norm() == 0.0);
            CHECK((ff.hydrostatic_ventral[i] + ff.hydrostatic_dorsal[i]).norm() == 0.0);
        }
    }

    SECTION("straight arm aligned with the flow: viscous drag only") {
        const auto ff = fluid_forces(cfg, f, g, fl);
        const double expect = -2.0 * M_PI * 0.015 * 1.0 * 1.002e-3 * 0.2 / 0.05;
        CHECK_THAT(expect, WithinRel(-3.777e-4, 1e-3));
        CHECK_THAT(ff.viscous[0].x, WithinRel(expect, 1e-12));
        CHECK_THAT(ff.viscous[0].y, WithinAbs(0.0, 1e-15));
        CHECK(ff.tangential_dyn[0].norm() == 0.0);
        CHECK(ff.normal_dyn[0].norm() == 0.0);
    }

    SECTION("tangent at 45 degrees: control-volume plug-in values") {
        auto f45 = StrainField::reference(g.node_count);
        const double c = std::sqrt(0.5);
        for (auto& v : f45.nu) v = c;
        for (auto& v : f45.eta) v = c;
        const auto cfg45 = reconstruct(g, f45);
        const auto ff = fluid_forces(cfg45, f45, g, fl);
        const double vt = 0.2 * c, vn = 0.2 * c;
        CHECK_THAT(vn, WithinRel(0.1414, 1e-3));
        const double coeff = M_PI * fl.water_density_kgpm3 * 1.0 * 0.015;
        const double tang = coeff * (vn * vn + 2.0 * vt * vn);
        CHECK_THAT(tang, WithinRel(coeff * 0.06, 1e-6));
        CHECK_THAT(ff.tangential_dyn[0].norm(), WithinRel(tang, 1e-9));
        // tangential reaction opposes the momentum gained by the deflected flow
        const Vec2 ut = cfg45.t[0].normalized();
        CHECK_THAT(ff.tangential_dyn[0].dot(ut), WithinRel(-tang, 1e-9));
        // normal push acts through the arm along the flow's normal component;
        // here the stream hits the +un face, so the push is along -un
        const Vec2 un = ut.perp();
        const double norm_mag = coeff * vn * vn;
        CHECK_THAT(ff.normal_dyn[0].norm(), WithinRel(norm_mag, 1e-9));
        CHECK_THAT(ff.normal_dyn[0].dot(un), WithinRel(-norm_mag, 1e-9));
    }

    SECTION("viscous force opposes the tangential flow component") {
        auto fr = bent_field(g);
        const auto cfgr = reconstruct(g, fr);
        const auto ff = fluid_forces(cfgr, fr, g, fl);
        for (std::size_t i = 0; i < g.node_count; ++i) {
            const Vec2 ut = cfgr.t[i].normalized();
            const double vt = fl.free_stream_mps * ut.x;
            if (vt > 1e-12) CHECK(ff.viscous[i].dot(ut) < 0.0);
            if (vt < -1e-12) CHECK(ff.viscous[i].dot(ut) > 0.0);
        }
    }

    SECTION("buoyant mode adds the net upward pressure difference") {
        fl.hydrostatic_mode = HydrostaticMode::buoyant;
        const auto ff = fluid_forces(cfg, f, g, fl, {0.0, 0.0}, 9.81);
        const double expect = fl.water_density_kgpm3 * 9.81 * M_PI * 0.015 * 0.015;
        CHECK_THAT(ff.hydrostatic_ventral[0].y, WithinRel(expect, 1e-12));
        CHECK(ff.hydrostatic_dorsal[0].norm() == 0.0);
    }
}

TEST_CASE("fluid loading is equivariant under rigid rotation of flow and arm") {
    const auto g = table_geom(101);
    const auto fr = bent_field(g);
    const auto cfg = reconstruct(g, fr);
    FluidParams fl;
    const auto base = fluid_forces(cfg, fr, g, fl, {fl.free_stream_mps, 0.0});

    std::mt19937 rng(123);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    for (int k = 0; k < 3; ++k) {
        const double phi = angle(rng);
        const auto cfg_rot = rotated_copy(cfg, phi);
        const Vec2 stream = rotate({fl.free_stream_mps, 0.0}, phi);
        const auto rot = fluid_forces(cfg_rot, fr, g, fl, stream);
        for (std::size_t i = 0; i < g.node_count; i += 10)
            CHECK_THAT((rot.total(i) - rotate(base.total(i), phi)).norm(),
                       WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("weight of the tapered arm") {
    const auto g = table_geom();
    const MaterialParams mat;
    auto f = StrainField::reference(g.node_count);

    SECTION("total weight equals the truncated-cone value") {
        const double analytic = mat.density_kgpm3 * mat.gravity_mps2 * M_PI *
                                g.length_m / 3.0 *
                                (g.r_max_m * g.r_max_m + g.r_max_m * g.r_min_m +
                                 g.r_min_m * g.r_min_m);
        CHECK_THAT(analytic, WithinRel(1.4218, 1e-3));
        const Vec2 W0 = segment_weight(f, g, mat, 0);
        CHECK_THAT(-W0.y, WithinRel(analytic, 1e-4));
        CHECK(W0.x == 0.0);
    }

    SECTION("empty tail segment") {
        CHECK(segment_weight(f, g, mat, g.node_count - 1).norm() == 0.0);
    }

    SECTION("linear in nu") {
        for (auto& v : f.nu) v = 2.0;
        const auto ref = StrainField::reference(g.node_count);
        CHECK_THAT(segment_weight(f, g, mat, 0).y,
                   WithinRel(2.0 * segment_weight(ref, g, mat, 0).y, 1e-12));
    }
}

TEST_CASE("assembled load field") {
    const auto g = table_geom();
    const MaterialParams mat;
    const auto f = StrainField::reference(g.node_count);
    const auto cfg = reconstruct(g, f);
    FluidParams fl;
    TcamLayout layout;

    SECTION("all sources off gives the zero field") {
        fl.free_stream_mps = 0.0;
        const auto L = assemble_loads(cfg, f, g, mat, layout, fl, {false, false});
        for (std::size_t i = 0; i < g.node_count; ++i) {
            CHECK(L.distributed_force[i].norm() == 0.0);
            CHECK(L.distributed_moment[i] == 0.0);
            CHECK(L.tip_concentrated_force[i].norm() == 0.0);
        }
    }

    SECTION("gravity only reproduces the weight density") {
        const auto L = assemble_loads(cfg, f, g, mat, layout, fl, {true, false});
        const auto w = weight_density(f, g, mat);
        std::vector<double> wy(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(L.distributed_force[i].x == 0.0);
            CHECK(L.distributed_force[i].y == w[i].y);
            wy[i] = w[i].y;
        }
        const auto tail = trapz_from_tip(wy, g.spacing());
        CHECK_THAT(tail[0], WithinRel(-1.4218, 1e-3));
    }

    SECTION("assembly is additive over load sources") {
        layout.segments[0].tension_N[0] = 12.0;
        const auto both = assemble_loads(cfg, f, g, mat, layout, fl, {true, true});
        const auto grav = assemble_loads(cfg, f, g, mat, layout, fl, {true, false});
        TcamLayout quiet = layout;
        quiet.segments[0].tension_N[0] = 0.0;
        const auto flow = assemble_loads(cfg, f, g, mat, quiet, fl, {false, true});
        const auto muscle = assemble_loads(cfg, f, g, mat, layout, fl, {false, false});
        for (std::size_t i = 0; i < g.node_count; i += 20) {
            const Vec2 sum = grav.distributed_force[i] + flow.distributed_force[i] +
                             muscle.distributed_force[i];
            CHECK_THAT((both.distributed_force[i] - sum).norm(), WithinAbs(0.0, 1e-9));
            CHECK_THAT(both.distributed_moment[i],
                       WithinAbs(grav.distributed_moment[i] + flow.distributed_moment[i] +
                                     muscle.distributed_moment[i],
                                 1e-9));
        }
        // concentrated pull sits at the segment-end node only
        for (std::size_t i = 0; i + 1 < g.node_count; ++i)
            CHECK(both.tip_concentrated_force[i].norm() == 0.0);
        CHECK(both.tip_concentrated_force.back().norm() > 11.0);
    }

    SECTION("straight arm: muscle moment about the base is T times the base offset") {
        // the muscle line of action crosses the base plane at height a1
        layout.segments[0].tension_N[0] = 20.0;
        const auto L = assemble_loads(cfg, f, g, mat, layout, fl, {false, false});
        const auto tail = trapz_from_tip(L.distributed_moment, g.spacing());
        const double base_moment = L.tip_concentrated_moment.back() + tail[0];
        CHECK_THAT(base_moment, WithinRel(20.0 * layout.segments[0].a_m, 1e-4));
    }
}
