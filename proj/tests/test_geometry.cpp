#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rigidflow/geometry/body.hpp"
#include "rigidflow/geometry/fields.hpp"
#include "rigidflow/geometry/quadrature.hpp"

using namespace rigidflow;
using namespace rigidflow::geometry;

namespace {

// hit-or-miss moments of the unit ball, independent of the library rules
Inertia monte_carlo_ball(int n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    Inertia out;
    Vec3d first = Vec3d::Zero();
    Mat3 second = Mat3::Zero();
    const double cell = 8.0 / n;
    for (int i = 0; i < n; ++i) {
        Vec3d x(U(gen), U(gen), U(gen));
        if (x.squaredNorm() > 1) continue;
        out.m += cell;
        first += cell * x;
        second += cell * x * x.transpose();
    }
    out.h0 = first / out.m;
    out.J = second.trace() * Mat3::Identity() - second;
    return out;
}

}  // namespace

TEST(Inertia, UnitSphereClosedForm) {
    auto in = compute_inertia(RigidBodySpec::sphere(1.0));
    EXPECT_NEAR(in.m, 4 * M_PI / 3, 1e-12);
    EXPECT_LT(in.h0.norm(), 1e-14);
    EXPECT_LT((in.J - 8 * M_PI / 15 * Mat3::Identity()).norm(), 1e-12);
}

TEST(Inertia, MonteCarloOracleAgrees) {
    auto mc = monte_carlo_ball(2'000'000, 3);
    auto in = compute_inertia(RigidBodySpec::sphere(1.0));
    EXPECT_NEAR(in.m, mc.m, 1e-2 * mc.m);
    EXPECT_LT(in.h0.norm(), 5e-3);
    EXPECT_LT((in.J - mc.J).norm(), 2e-2 * mc.J.norm());
}

TEST(Inertia, QuadraturePathWithin1e3) {
    auto exact = compute_inertia(RigidBodySpec::sphere(1.0));
    auto q = inertia_by_quadrature(RigidBodySpec::sphere(1.0));
    EXPECT_NEAR(q.m, exact.m, 1e-3 * exact.m);
    EXPECT_LT((q.J - exact.J).norm(), 1e-3 * exact.J.norm());
}

TEST(Inertia, DensityScalingIsLinear) {
    auto a = RigidBodySpec::from_mesh(icosphere(2, 1.0));
    auto b = a;
    b.inertia_scale = 10.0;
    auto ia = compute_inertia(a), ib = compute_inertia(b);
    EXPECT_NEAR(ib.m, 10 * ia.m, 1e-12 * ib.m);
    EXPECT_LT((ib.J - 10 * ia.J).norm(), 1e-12 * ib.J.norm());
    EXPECT_LT((ib.h0 - ia.h0).norm(), 1e-14);
}

TEST(Inertia, CentrallySymmetricMeshCentredAtOrigin) {
    auto in = compute_inertia(RigidBodySpec::from_mesh(icosphere(3, 1.0)));
    EXPECT_LT(in.h0.norm(), 1e-14);
    Eigen::SelfAdjointEigenSolver<Mat3> es(in.J);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0);
    EXPECT_LT((in.J - in.J.transpose()).norm(), 1e-14);
}

TEST(Inertia, LayeredSphereShells) {
    auto s = RigidBodySpec::layered_sphere({0.5, 1.0}, {3.0, 1.0});
    auto in = compute_inertia(s);
    double m = 4 * M_PI / 3 * (3.0 * 0.125 + 1.0 * (1 - 0.125));
    EXPECT_NEAR(in.m, m, 1e-12);
}

TEST(Mesh, RejectsDegenerateAndOpenMeshes) {
    TriMesh flat;
    flat.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    flat.faces = {{0, 1, 2}, {2, 1, 0}};  // two faces, zero volume
    EXPECT_THROW(compute_inertia(RigidBodySpec::from_mesh(flat)), std::invalid_argument);
    TriMesh open = icosphere(1);
    open.faces.pop_back();
    EXPECT_THROW(validate(open), std::invalid_argument);
    TriMesh inward = icosphere(1);
    for (auto& f : inward.faces) std::swap(f[1], f[2]);
    EXPECT_THROW(validate(inward), std::invalid_argument);
}

TEST(Mesh, AsciiRoundTrip) {
    TriMesh m = icosphere(2, 1.3);
    std::stringstream ss;
    write_mesh(ss, m);
    TriMesh r = read_mesh(ss);
    ASSERT_EQ(r.faces.size(), m.faces.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) EXPECT_EQ(r.vertices[i], m.vertices[i]);
    std::istringstream bad("vertices 2\n0 0 0\n");
    EXPECT_THROW(read_mesh(bad), std::invalid_argument);
}

TEST(Mesh, VolumeMatchedIcosphere) {
    TriMesh m = icosphere(4, 1.0, true);
    EXPECT_EQ(m.faces.size(), 5120u);
    EXPECT_NEAR(m.volume(), 4 * M_PI / 3, 1e-12);
}

TEST(Quadrature, SphereAreaAndClosedSurfaceMoments) {
    auto q = make_quadrature(RigidBodySpec::sphere(1.0), 4, 4, 3.0);
    double area = 0;
    Vec3d n = Vec3d::Zero(), xn = Vec3d::Zero();
    for (std::size_t i = 0; i < q.surface.size(); ++i) {
        area += q.surface.w[i];
        n += q.surface.w[i] * q.surface.n[i];
        xn += q.surface.w[i] * q.surface.x[i].cross(q.surface.n[i]);
        EXPECT_NEAR(q.surface.n[i].norm(), 1.0, 1e-14);
        EXPECT_GT(q.surface.w[i], 0);
    }
    EXPECT_NEAR(area, 4 * M_PI, 1e-12);
    EXPECT_LT(n.norm(), 1e-13);
    EXPECT_LT(xn.norm(), 1e-13);
}

TEST(Quadrature, MeshSurfaceArea) {
    TriMesh m = icosphere(3);
    auto q = make_quadrature(RigidBodySpec::from_mesh(m), 6, 4, 4.0);
    double area = 0;
    Vec3d n = Vec3d::Zero();
    for (std::size_t i = 0; i < q.surface.size(); ++i) {
        area += q.surface.w[i];
        n += q.surface.w[i] * q.surface.n[i];
    }
    EXPECT_NEAR(area, m.area(), 1e-12 * m.area());
    EXPECT_LT(n.norm(), 1e-12);
}

TEST(Quadrature, FluidRuleIntegratesDecayingRadialFunction) {
    // int_{|x|>1} |x|^-6 dx = 4 pi / 3
    auto q = make_quadrature(RigidBodySpec::sphere(1.0), 6, 12, 3.0);
    double s = 0;
    for (std::size_t i = 0; i < q.fluid.size(); ++i) s += q.fluid.w[i] * std::pow(q.fluid.x[i].norm(), -6);
    EXPECT_NEAR(s, 4 * M_PI / 3, 1e-10);
}

TEST(Quadrature, TruncationRadiusTooSmallRejected) {
    EXPECT_THROW(make_quadrature(RigidBodySpec::sphere(1.0), 4, 4, 1.5), std::invalid_argument);
    EXPECT_THROW(make_quadrature(RigidBodySpec::sphere(1.0), 0, 4, 3.0), std::invalid_argument);
}

TEST(Cutoff, OneOnInnerLayerZeroOutside) {
    CutoffField chi(RigidBodySpec::sphere(1.0), 0.25);
    EXPECT_EQ(chi.value(Vec3d(1.125, 0, 0)), 1.0);  // d = c/2
    EXPECT_EQ(chi.value(Vec3d(0, 1.6, 0)), 0.0);    // d > 2c
    double mid = chi.value(Vec3d(0, 0, 1.375));
    EXPECT_GT(mid, 0);
    EXPECT_LT(mid, 1);
}

TEST(Cutoff, SecondDerivativeContinuousAtJoins) {
    // quintic bump: value, first and second derivative match at d = c and 2c
    auto f = [](double t) { return quintic_bump(t); };
    const double h = 1e-4;
    for (double t0 : {0.0, 1.0}) {
        double d2l = (f(t0 - 2 * h) - 2 * f(t0 - h) + f(t0)) / (h * h);
        double d2r = (f(t0) - 2 * f(t0 + h) + f(t0 + 2 * h)) / (h * h);
        EXPECT_NEAR(d2l, d2r, 1e-2);
    }
}

TEST(Cutoff, MeshDistanceMatchesSphere) {
    auto spec = RigidBodySpec::from_mesh(icosphere(4, 1.0));
    CutoffField chi(spec, 0.25);
    EXPECT_NEAR(chi.distance(Vec3d(2, 0, 0)), 1.0, 2e-3);
    EXPECT_LT(chi.distance(Vec3d(0.2, 0.1, 0)), 0);
}

TEST(Truncation, IdentityInsideBoundedEverywhere) {
    TruncationField chiR(5.0);
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> U(-20, 20);
    for (int i = 0; i < 10000; ++i) {
        Vec3d x(U(gen), U(gen), U(gen));
        Vec3d y = chiR(x);
        EXPECT_LE(y.norm(), 5.0 * (1 + 1e-15));
        if (x.norm() <= 5.0) EXPECT_EQ(y, x);
    }
}

TEST(Truncation, RotationOfTruncatedArmIsDivergenceFree) {
    TruncationField chiR(2.0);
    Vec3d r(0.3, -1.2, 0.7);
    auto f = [&](const Vec3d& x) { return Vec3d(r.cross(chiR(x))); };
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> U(-4, 4);
    const double h = 1e-5;
    for (int i = 0; i < 200; ++i) {
        Vec3d x(U(gen), U(gen), U(gen));
        if (std::abs(x.norm() - 2.0) < 1e-3) continue;
        double div = 0;
        for (int k = 0; k < 3; ++k) {
            Vec3d e = Vec3d::Unit(k) * h;
            div += (f(x + e)[k] - f(x - e)[k]) / (2 * h);
        }
        EXPECT_NEAR(div, 0, 1e-8);
    }
}
