#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rigidflow/forms/forms.hpp"
#include "rigidflow/geometry/quadrature.hpp"
#include "rigidflow/kirchhoff/added_mass.hpp"
#include "rigidflow/kirchhoff/test_fields.hpp"

using namespace rigidflow;
using namespace rigidflow::kirchhoff;
using geometry::RigidBodySpec;

namespace {

// textbook translational potential of the unit sphere
double phi1_exact(const Vec3d& x) { return -x[0] / (2 * std::pow(x.norm(), 3)); }

Vec3d fd_grad(const std::function<double(const Vec3d&)>& f, const Vec3d& x, double h = 1e-5) {
    Vec3d g;
    for (int k = 0; k < 3; ++k) {
        Vec3d e = Vec3d::Unit(k) * h;
        g[k] = (f(x + e) - f(x - e)) / (2 * h);
    }
    return g;
}

double fd_laplacian(const std::function<double(const Vec3d&)>& f, const Vec3d& x, double h = 1e-3) {
    double s = 0;
    for (int k = 0; k < 3; ++k) {
        Vec3d e = Vec3d::Unit(k) * h;
        s += (f(x + e) - 2 * f(x) + f(x - e)) / (h * h);
    }
    return s;
}

geometry::TriMesh stretched(int level, const Vec3d& axes) {
    auto m = geometry::icosphere(level, 1.0);
    for (auto& v : m.vertices) v = v.cwiseProduct(axes);
    return m;
}

}  // namespace

TEST(SpherePotential, MatchesClassicalFormulaAndNeumannData) {
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    std::mt19937_64 gen(2);
    std::normal_distribution<double> N(0, 1);
    for (int i = 0; i < 50; ++i) {
        Vec3d n(N(gen), N(gen), N(gen));
        n.normalize();
        EXPECT_NEAR(k.potentials->phi(0, 2.0 * n), phi1_exact(2.0 * n), 1e-15);
        // the oracle itself has dPhi/dn = n_1 on |x| = 1
        EXPECT_NEAR(fd_grad(phi1_exact, n).dot(n), n[0], 1e-8);
        EXPECT_NEAR(k.potentials->grad(0, n).dot(n), n[0], 1e-13);
    }
}

TEST(SpherePotential, RotationalPotentialsVanish) {
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    for (int i = 3; i < 6; ++i) {
        EXPECT_EQ(k.potentials->phi(i, Vec3d(1.3, -0.2, 0.5)), 0.0);
        EXPECT_EQ(k.potentials->grad(i, Vec3d(1.3, -0.2, 0.5)).norm(), 0.0);
    }
}

TEST(SpherePotential, DecaysLikeInverseSquare) {
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    std::vector<double> r{5, 10, 20}, y;
    for (double s : r) y.push_back(std::abs(k.potentials->phi(0, Vec3d(s, 0, 0))));
    double slope = std::log(y[2] / y[0]) / std::log(r[2] / r[0]);
    EXPECT_NEAR(slope, -2.0, 1e-10);
}

TEST(AddedMass, UnitSphereAnalyticPath) {
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    Mat6 expect = Mat6::Zero();
    expect.diagonal() << 2 * M_PI / 3, 2 * M_PI / 3, 2 * M_PI / 3, 0, 0, 0;
    EXPECT_LT((k.M2 - expect).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(AddedMass, IndependentVolumeQuadratureOfTheClassicalPotential) {
    // int_{|x|>1} |grad Phi_1|^2 with the textbook potential: radial part
    // by Gauss-Legendre in s = 1/r, angular part in closed form
    // |grad Phi_1|^2 = (1 + 3 cos^2) / (4 r^6) about e_1; angular integral 8 pi.
    auto g = gauss_legendre(20, 0.0, 1.0);
    double radial = 0;
    for (std::size_t q = 0; q < g.x.size(); ++q) radial += g.w[q] * std::pow(g.x[q], 2);  // r^-4 dr = s^2 ds
    double value = 8 * M_PI / 4 * radial;
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    EXPECT_NEAR(k.M2(0, 0), value, 1e-12);
}

TEST(AddedMass, GreenIdentityCrossCheckWithinOnePercent) {
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    auto q = geometry::make_quadrature(k.spec, 12, 16, 3.0);
    Mat6 vol = added_mass_volume(*k.potentials, q.fluid);
    EXPECT_LT((vol - k.M2).norm(), 1e-2 * k.M2.norm());
}

TEST(AddedMass, BemVolumeMatchedIcosphereWithin1e3) {
    auto k = make_kirchhoff(RigidBodySpec::from_mesh(geometry::icosphere(4, 1.0, true)));
    Mat6 expect = Mat6::Zero();
    expect.diagonal() << 2 * M_PI / 3, 2 * M_PI / 3, 2 * M_PI / 3, 0, 0, 0;
    EXPECT_LT((k.M2 - expect).norm() / expect.norm(), 1e-3);
}

TEST(AddedMass, SymmetricPsdAndIndependentOfDensity) {
    auto spec = RigidBodySpec::from_mesh(stretched(2, {1.4, 1.0, 0.8}));
    auto k1 = make_kirchhoff(spec);
    EXPECT_LT(k1.asymmetry, 5e-2);
    EXPECT_EQ(k1.M2, k1.M2.transpose());
    std::mt19937_64 gen(4);
    std::normal_distribution<double> N(0, 1);
    for (int i = 0; i < 100; ++i) {
        Vec6 u;
        for (int j = 0; j < 6; ++j) u[j] = N(gen);
        EXPECT_GE(u.dot(k1.M2 * u), -1e-12 * k1.M2.norm() * u.squaredNorm());
    }
    for (double sigma : {10.0, 100.0}) {
        auto s = spec;
        s.inertia_scale = sigma;
        auto ks = make_kirchhoff(s);
        EXPECT_LT((ks.M2 - k1.M2).norm(), 1e-12 * k1.M2.norm());
        EXPECT_NEAR(ks.inertia.m, sigma * k1.inertia.m, 1e-12 * ks.inertia.m);
    }
}

TEST(AddedMass, BemPotentialIsHarmonicAwayFromTheBody) {
    auto spec = RigidBodySpec::from_mesh(stretched(3, {1.3, 1.0, 0.9}));
    auto k = make_kirchhoff(spec);
    for (int i : {0, 4}) {
        auto f = [&](const Vec3d& x) { return k.potentials->phi(i, x); };
        for (Vec3d x : {Vec3d(2.5, 0.3, 0.1), Vec3d(-0.4, 2.2, 1.0), Vec3d(0.2, -0.5, -2.4)}) {
            double scale = k.potentials->grad(i, x).norm() / x.norm();
            EXPECT_LT(std::abs(fd_laplacian(f, x)), 1e-3 * scale);
        }
    }
}

TEST(AddedMass, BemReproducesNeumannData) {
    auto spec = RigidBodySpec::from_mesh(stretched(3, {1.3, 1.0, 0.9}));
    auto k = make_kirchhoff(spec);
    auto* bem = dynamic_cast<const BemPotentials*>(k.potentials.get());
    ASSERT_NE(bem, nullptr);
    for (int i = 0; i < 6; ++i) EXPECT_LT(bem->report().residual[i], 1e-8);
    // flux through the surface of each potential is zero (no sources)
    for (int i = 0; i < 6; ++i) {
        double flux = 0, mag = 0;
        for (std::size_t f = 0; f < bem->centroids().size(); ++f) {
            double kn = neumann_data(i, bem->centroids()[f], bem->normals()[f]);
            flux += bem->areas()[f] * kn;
            mag += bem->areas()[f] * std::abs(kn);
        }
        EXPECT_LT(std::abs(flux), 1e-12 * std::max(mag, 1.0));
    }
}

TEST(InverseBound, SphereRotationalBlockIsJ0) {
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    auto r = inverse_bound_check(k.M, k.inertia.m, k.inertia.J, Vec3d::Zero(), Vec3d::UnitX());
    EXPECT_NEAR(r.lhs, (k.inertia.J.inverse() * Vec3d::UnitX()).norm(), 1e-14);
    EXPECT_TRUE(r.holds);
}

TEST(InverseBound, HeavySphereHoldsAgainstDenseSolve) {
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    double m = 1e6 * 2 * M_PI / 3;
    Mat3 J = 1e6 * Mat3::Identity();
    Mat6 M = block_inertia(m, J) + k.M2;
    auto r = inverse_bound_check(M, m, J, Vec3d::UnitX(), Vec3d::Zero());
    Vec6 b = Vec6::Zero();
    b[0] = 1;
    EXPECT_NEAR(r.lhs, M.fullPivLu().solve(b).norm(), 1e-18);
    EXPECT_TRUE(r.holds);
}

TEST(InverseBound, ThresholdSearchReports) {
    auto k = make_kirchhoff(RigidBodySpec::from_mesh(stretched(2, {1.4, 1.0, 0.8})));
    auto s = search_threshold(k.M2, k.inertia.J, {1e-3, 1e-2, 1e-1, 1, 10}, 50);
    EXPECT_TRUE(s.found);
    EXPECT_GT(s.threshold, 0);
}

TEST(InverseBound, SingularMatrixRejected) {
    EXPECT_THROW(inverse_bound_check(Mat6::Zero(), 1, Mat3::Identity(), Vec3d::UnitX(), Vec3d::Zero()),
                 std::runtime_error);
}

TEST(TestFields, RigidInsideNormalTraceOutside) {
    auto k = make_kirchhoff(RigidBodySpec::from_mesh(stretched(3, {1.3, 1.0, 0.9})));
    auto v = rigid_test_fields(k);
    EXPECT_EQ(v[0].rigid(Vec3d(0.1, 0.2, 0.3)), Vec3d::UnitX());
    EXPECT_EQ(v[3].rigid(Vec3d(0.1, 0.2, 0.3)), Vec3d::UnitX().cross(Vec3d(0.1, 0.2, 0.3)));
    // v4.n just outside the surface against [x ^ n]_1, over the panels
    auto* bem = dynamic_cast<const BemPotentials*>(k.potentials.get());
    double err = 0, mag = 0;
    for (std::size_t f = 0; f < bem->centroids().size(); f += 7) {
        Vec3d x = bem->centroids()[f], n = bem->normals()[f];
        double kn = neumann_data(3, x, n);
        err = std::max(err, std::abs(v[3].at(x + 1e-3 * n).u.dot(n) - kn));
        mag = std::max(mag, std::abs(kn));
    }
    EXPECT_LT(err, 0.05 * mag);
}

TEST(TestFields, DivergenceFreeInFluid) {
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    auto v = rigid_test_fields(k);
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int i = 0; i < 100; ++i) {
        Vec3d x(U(gen), U(gen), U(gen));
        if (x.norm() < 1.1) continue;
        // FD divergence of the classical field
        double div = 0;
        const double h = 1e-5;
        for (int c = 0; c < 3; ++c) {
            Vec3d e = Vec3d::Unit(c) * h;
            div += (fd_grad(phi1_exact, x + e)[c] - fd_grad(phi1_exact, x - e)[c]) / (2 * h);
        }
        EXPECT_NEAR(div, 0, 1e-4);
        EXPECT_NEAR(v[0].at(x).grad.trace(), 0, 1e-13);
        EXPECT_LT((v[0].at(x).u - fd_grad(phi1_exact, x)).norm(), 1e-8);
    }
}

TEST(TestFields, AddedMassIdentityForPotentialFlow) {
    auto k = make_kirchhoff(RigidBodySpec::sphere(1.0));
    forms::FormsContext ctx;
    ctx.quad = geometry::make_quadrature(k.spec, 12, 16, 3.0);
    ctx.m = k.inertia.m;
    ctx.J = k.inertia.J;
    auto v = rigid_test_fields(k);
    Vec3d l(0.3, -1.0, 0.2), r(0.5, 0.1, -0.7);
    auto u = potential_flow(k, l, r);
    Vec6 lr;
    lr << l, r;
    Vec6 lhs;
    for (int i = 0; i < 6; ++i) lhs[i] = forms::inner_h(ctx, u, v[i]);
    EXPECT_LT((lhs - k.M * lr).norm(), 1e-9 * (k.M * lr).norm());
}
