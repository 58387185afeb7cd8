#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rigidflow/euler/energy.hpp"
#include "rigidflow/euler/solver.hpp"
#include "rigidflow/studies/common.hpp"

using namespace rigidflow;
using namespace rigidflow::euler;

namespace {

const EulerGeometry& sphere_geometry() {
    static const EulerGeometry g = [] {
        auto k = kirchhoff::make_kirchhoff(geometry::RigidBodySpec::sphere(1.0));
        forms::FormsContext ctx;
        ctx.quad = geometry::make_quadrature(k.spec, 8, 8, 3.0);
        ctx.m = k.inertia.m;
        ctx.J = k.inertia.J;
        ctx.chi = geometry::CutoffField(k.spec, 0.25);
        return make_euler_geometry(k, ctx, 20);
    }();
    return g;
}

RingSpec coarse_ring() {
    RingSpec r;
    r.spacing = 0.2;
    r.centre = Vec3d(0, 0, 2.0);
    return r;
}

Vec3d singular_kernel(const VortexField& w, const Vec3d& x) {
    Vec3d u = Vec3d::Zero();
    for (std::size_t p = 0; p < w.size(); ++p) {
        Vec3d d = x - w.x[p];
        u += w.alpha[p].cross(d) / std::pow(d.norm(), 3);
    }
    return u / (4 * M_PI);
}

Vec3d fd_curl(const std::function<Vec3d(const Vec3d&)>& f, const Vec3d& x, double h) {
    Mat3 g;
    for (int k = 0; k < 3; ++k) {
        Vec3d e = Vec3d::Unit(k) * h;
        g.col(k) = (f(x + e) - f(x - e)) / (2 * h);
    }
    return {g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1)};
}

}  // namespace

TEST(Particles, FarFieldMatchesSingularBiotSavart) {
    VortexField w;
    w.eps = 0.05;
    w.x = {Vec3d(0.1, 0, 0), Vec3d(-0.2, 0.3, 0.1)};
    w.alpha = {Vec3d(0, 0, 1), Vec3d(0.4, -0.2, 0.3)};
    w.vol = {1, 1};
    for (const Vec3d& x : {Vec3d(3, 1, 0), Vec3d(-2, 0.5, 4)}) {
        Vec3d a = biot_savart(w, x), b = singular_kernel(w, x);
        EXPECT_LT((a - b).norm(), 1e-3 * b.norm());
    }
}

TEST(Particles, GradientMatchesFiniteDifferences) {
    VortexField w = seed_ring(coarse_ring());
    const double h = 1e-5;
    for (const Vec3d& x : {Vec3d(0.6, 0.1, 2.0), Vec3d(0, 0, 1.2), Vec3d(1.5, -0.4, 0.3)}) {
        Sample s = biot_savart_grad(w, x);
        EXPECT_LT((s.u - biot_savart(w, x)).norm(), 1e-14 * (1 + s.u.norm()));
        for (int k = 0; k < 3; ++k) {
            Vec3d e = Vec3d::Unit(k) * h;
            Vec3d fd = (biot_savart(w, x + e) - biot_savart(w, x - e)) / (2 * h);
            EXPECT_LT((fd - s.grad.col(k)).norm(), 1e-7 * (1 + s.grad.norm()));
        }
        EXPECT_NEAR(s.grad.trace(), 0, 1e-12 * (1 + s.grad.norm()));
    }
}

TEST(Particles, CurlApproximatesMollifiedVorticityInTheCore) {
    RingSpec spec = coarse_ring();
    spec.spacing = 0.1;
    VortexField w = seed_ring(spec);
    // a point on the core centreline, between lattice nodes
    Vec3d x = spec.centre + Vec3d(spec.radius, 0, 0);
    Vec3d curl = fd_curl([&](const Vec3d& y) { return biot_savart(w, y); }, x, 1e-4);
    Vec3d om = mollified_vorticity(w, x);
    EXPECT_LT((curl - om).norm(), 0.1 * om.norm());
    EXPECT_GT(om.norm(), 1.0);
}

TEST(Particles, RingImpulseMatchesProfileIntegral) {
    RingSpec spec = coarse_ring();
    EXPECT_GT(seed_ring(spec).size(), 50u);
    spec.spacing = 0.025;
    VortexField w = seed_ring(spec);
    EXPECT_LT(w.total_strength().norm(), 1e-10);
    // pi int omega r^2 over the core section, midpoint rule on a fine grid
    const int n = 800;
    const double s = spec.core, h = 2 * s / n, peak = spec.circulation * 4 / (M_PI * s * s);
    double P = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double a = -s + (i + 0.5) * h, b = -s + (j + 0.5) * h;
            double q = (a * a + b * b) / (s * s);
            if (q < 1) P += peak * std::pow(1 - q, 3) * std::pow(spec.radius + a, 2) * h * h;
        }
    P *= M_PI;
    Vec3d I = w.impulse();
    EXPECT_NEAR(I.dot(spec.axis), P, 2e-3 * P);
    EXPECT_LT((I - I.dot(spec.axis) * spec.axis).norm(), 1e-10);
    EXPECT_THROW(seed_ring(RingSpec{Vec3d::Zero(), Vec3d::UnitZ(), 0.2, 0.3}), std::invalid_argument);
}

TEST(Reconstruction, NoVorticityIsPotentialFlow) {
    const auto& g = sphere_geometry();
    VortexField none;
    Vec3d ell(0.3, -0.5, 1.0), rot(0.2, 0.7, -0.1);
    Reconstruction rec(g, none, ell, rot);
    for (const Vec3d& x : {Vec3d(1.5, 0, 0), Vec3d(0.3, -2, 1)}) {
        Vec3d u = Vec3d::Zero();
        for (int i = 0; i < 3; ++i) u += ell[i] * g.k.potentials->grad(i, x);
        EXPECT_LT((rec.velocity(x) - u).norm(), 1e-12);
        // sphere dipole, written out
        double r = x.norm();
        Vec3d dip = -0.5 * (ell / std::pow(r, 3) - 3 * ell.dot(x) * x / std::pow(r, 5));
        EXPECT_LT((u - dip).norm(), 1e-12);
    }
    EXPECT_LT(rec.bc_residual(), 1e-12);
}

TEST(Reconstruction, RingSatisfiesBoundaryCondition) {
    const auto& g = sphere_geometry();
    VortexField w = seed_ring(coarse_ring());
    Reconstruction rec(g, w, Vec3d(0, 0.2, 0.5), Vec3d(0.1, 0, 0.3));
    EXPECT_LT(rec.bc_residual(), 1e-6);
    // without the correction the ring's own normal velocity is O(1e-2)
    double raw = 0;
    for (std::size_t i = 0; i < g.check_nodes.size(); ++i)
        raw = std::max(raw, std::abs(biot_savart(w, g.check_nodes[i]).dot(g.check_normals[i])));
    EXPECT_GT(raw, 1e-3);
}

TEST(Solver, ZeroStateIsStationary) {
    EulerParams p;
    p.T = 0.1;
    p.dt = 0.05;
    auto tr = run_euler(sphere_geometry(), EulerState{}, p);
    for (const auto& r : tr.rows) {
        EXPECT_EQ(r.ell.norm(), 0.0);
        EXPECT_EQ(r.rot.norm(), 0.0);
    }
}

TEST(Solver, PotentialFlowExertsNoForceOnTranslatingSphere) {
    EulerParams p;
    p.T = 0.2;
    p.dt = 0.05;
    EulerState s;
    s.ell = Vec3d(0.2, 0, 1);
    auto tr = run_euler(sphere_geometry(), s, p);
    ASSERT_EQ(tr.rows.size(), 5u);
    for (const auto& r : tr.rows) {
        EXPECT_LT((r.ell - s.ell).norm(), 1e-10);
        EXPECT_LT(r.rot.norm(), 1e-10);
    }
    EXPECT_LT(tr.energy_drift(), 1e-8);
}

TEST(Solver, FrozenBodyStaysPut) {
    EulerParams p;
    p.T = 0.1;
    p.dt = 0.05;
    p.frozen_body = true;
    p.energy_every = 0;
    EulerState s;
    s.field = seed_ring(coarse_ring());
    auto tr = run_euler(sphere_geometry(), s, p);
    for (const auto& r : tr.rows) {
        EXPECT_EQ(r.ell.norm(), 0.0);
        EXPECT_EQ(r.rot.norm(), 0.0);
        EXPECT_LT(r.bc_residual, 1e-6);
    }
    // the ring still moves toward the body
    double z0 = 0, z1 = 0;
    for (const auto& x : s.field.x) z0 += x.z();
    for (const auto& x : tr.snapshots.back().x) z1 += x.z();
    EXPECT_LT(z1, z0);
}

TEST(Solver, RingApproachingFreeSphereConservesEnergy) {
    EulerParams p;
    p.T = 0.1;
    p.dt = 0.05;
    EulerState s;
    s.field = seed_ring(coarse_ring());
    auto tr = run_euler(sphere_geometry(), s, p);
    EXPECT_LT(tr.energy_drift(), 1e-3);
    EXPECT_LT(tr.max_bc_residual(), 1e-6);
    // the ring pushes the sphere along its axis
    EXPECT_LT(tr.rows.back().ell.z(), 0);
    EXPECT_EQ(tr.reflections, 0);
}

// A weak particle far from a spinning sphere sees only the frame rotation:
// position and strength both turn by -w0 t about the spin axis.
TEST(Solver, RotatingFrameTransportsParticlesRigidly) {
    EulerParams p;
    p.T = 0.5;
    p.dt = 0.05;
    p.energy_every = 0;
    EulerState s;
    s.rot = Vec3d(0, 0, 1);
    s.field.eps = 0.2;
    s.field.x = {Vec3d(3, 0, 0.5)};
    s.field.alpha = {Vec3d(1e-6, 2e-6, 0)};
    s.field.vol = {1};
    auto tr = run_euler(sphere_geometry(), s, p);
    const double t = tr.rows.back().t;
    EXPECT_NEAR(t, 0.5, 1e-12);
    Eigen::AngleAxisd R(-t, Vec3d::UnitZ());
    const auto& w = tr.snapshots.back();
    EXPECT_LT((w.x[0] - R * s.field.x[0]).norm(), 1e-6);
    EXPECT_LT((w.alpha[0] - R * s.field.alpha[0]).norm(), 1e-6 * s.field.alpha[0].norm());
    EXPECT_LT((tr.rows.back().rot - s.rot).norm(), 1e-12);
}

// d/dt (u, v_i)_H, with the inner product taken by volume quadrature of the
// reconstructed velocity, against the recorded b(u, u, v_i).
TEST(Solver, WeakFormHoldsForTestFields) {
    const auto& g = sphere_geometry();
    EulerParams p;
    p.T = 0.2;
    p.dt = 0.05;
    p.energy_every = 0;
    EulerState s;
    s.field = seed_ring(coarse_ring());
    auto tr = run_euler(g, s, p);
    ASSERT_EQ(tr.rows.size(), 5u);
    const double m = g.k.inertia.m;
    const Mat3 J = g.k.inertia.J;
    std::vector<double> t;
    std::vector<Vec6> y;
    for (std::size_t n = 0; n < tr.rows.size(); ++n) {
        const auto& r = tr.rows[n];
        const auto& w = tr.snapshots[n];
        Reconstruction rec(g, w, r.ell, r.rot);
        auto rule = adapted_fluid_rule(g.radius, w);
        Vec6 h;
        h.head<3>() = m * r.ell;
        h.tail<3>() = J * r.rot;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            Vec3d u = rec.velocity(rule.x[q]);
            for (int i = 0; i < 6; ++i)
                if (!g.k.potentials->vanishes(i)) h[i] += rule.w[q] * u.dot(g.k.potentials->grad(i, rule.x[q]));
        }
        t.push_back(r.t);
        y.push_back(h);
    }
    auto d = studies::fd_derivative(t, y);
    for (std::size_t n = 0; n < t.size(); ++n) {
        const Vec6& f = tr.rows[n].forcing;
        EXPECT_GT(f.norm(), 1e-2);
        EXPECT_LT((d[n] - f).norm(), 1e-3 * f.norm()) << "t = " << t[n];
    }
}
