#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/IterativeSolvers>

#include "rigidflow/core/jet.hpp"
#include "rigidflow/core/parallel.hpp"
#include "rigidflow/geometry/body.hpp"
#include "rigidflow/geometry/quadrature.hpp"

namespace rigidflow::kirchhoff {

using geometry::RigidBodySpec;
using geometry::TriMesh;

// Neumann data K_i at a surface point with outward body normal n. The sign
// of n cancels between K_i and the normal derivative, so either convention
// describes the same potential.
inline double neumann_data(int i, const Vec3d& x, const Vec3d& n) {
    return i < 3 ? n[i] : x.cross(n)[i - 3];
}

// The six exterior potentials Phi_i (index 0..5 here, 1..6 in the text).
class Potentials {
public:
    virtual ~Potentials() = default;
    virtual double phi(int i, const Vec3d& x) const = 0;
    virtual Vec3d grad(int i, const Vec3d& x) const = 0;
    virtual Mat3 hess(int i, const Vec3d& x) const = 0;
    virtual bool vanishes(int) const { return false; }
    virtual std::string method() const = 0;
};

// Sphere of radius a about the origin: Phi_i = -a^3 x_i / (2|x|^3), and the
// rotational potentials vanish because x ^ n = 0.
class SpherePotentials final : public Potentials {
public:
    explicit SpherePotentials(double a) : a_(a) {}

    template <class S>
    S eval(int i, const Vec3<S>& x) const {
        using std::sqrt;
        if (i >= 3) return S(0.0);
        S r2 = norm2(x);
        return x[i] * (-0.5 * a_ * a_ * a_) / (r2 * sqrt(r2));
    }

    double phi(int i, const Vec3d& x) const override { return eval(i, from_eigen(x)); }
    Vec3d grad(int i, const Vec3d& x) const override {
        if (i >= 3) return Vec3d::Zero();
        double r2 = x.squaredNorm(), r = std::sqrt(r2), c = -0.5 * a_ * a_ * a_;
        // d/dx_j (x_i r^-3) = delta_ij r^-3 - 3 x_i x_j r^-5
        Vec3d g = -3.0 * x[i] * x / (r2 * r2 * r);
        g[i] += 1.0 / (r2 * r);
        return c * g;
    }
    Mat3 hess(int i, const Vec3d& x) const override {
        if (i >= 3) return Mat3::Zero();
        using J1 = Jet<double, 3>;
        using J2 = Jet<J1, 3>;
        Vec3<J2> X;
        for (int k = 0; k < 3; ++k) {
            X[k].v.v = x[k];
            X[k].v.d[k] = 1.0;
            X[k].d[k].v = 1.0;
        }
        J2 p = eval(i, X);
        Mat3 H;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) H(j, k) = p.d[j].d[k];
        return H;
    }
    bool vanishes(int i) const override { return i >= 3; }
    std::string method() const override { return "analytic-sphere"; }
    double radius() const { return a_; }

private:
    double a_;
};

// ---------------------------------------------------------------------------
// Boundary elements on flat triangles.

namespace detail {

// Integral of 1/|p - y| over triangle (a,b,c) for p in the triangle's plane.
inline double inplane_inverse_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    const Vec3d n = (b - a).cross(c - a).normalized();
    const std::array<Vec3d, 3> v{a, b, c};
    double total = 0;
    for (int e = 0; e < 3; ++e) {
        Vec3d v0 = v[e], v1 = v[(e + 1) % 3];
        Vec3d t = (v1 - v0).normalized();
        Vec3d m = t.cross(n);  // outward in-plane edge normal for ccw triangles
        double d = (v0 - p).dot(m);
        if (std::abs(d) < 1e-15) continue;
        double sm = (v0 - p).dot(t), sp = (v1 - p).dot(t);
        double rm = (v0 - p).norm(), rp = (v1 - p).norm();
        total += d * std::log((sp + rp) / (sm + rm));
    }
    return total;
}

struct Subrule {
    std::vector<std::array<double, 3>> bary;
    std::vector<double> w;
};

// 7-point degree-5 rule on a triangle split into 4^level congruent pieces
inline Subrule subdivided_rule(int level) {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    const std::vector<std::array<double, 4>> base = {
        {1. / 3, 1. / 3, 1. / 3, 0.225}, {a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
        {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2}};
    std::vector<std::array<std::array<double, 3>, 3>> tris{{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}};
    for (int l = 0; l < level; ++l) {
        std::vector<std::array<std::array<double, 3>, 3>> nt;
        for (auto& t : tris) {
            auto mid = [](const std::array<double, 3>& p, const std::array<double, 3>& q) {
                return std::array<double, 3>{(p[0] + q[0]) / 2, (p[1] + q[1]) / 2, (p[2] + q[2]) / 2};
            };
            auto ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            nt.push_back({t[0], ab, ca});
            nt.push_back({t[1], bc, ab});
            nt.push_back({t[2], ca, bc});
            nt.push_back({ab, bc, ca});
        }
        tris = std::move(nt);
    }
    Subrule r;
    double scale = 1.0 / tris.size();
    for (auto& t : tris)
        for (auto& b : base) {
            std::array<double, 3> p{};
            for (int k = 0; k < 3; ++k) p[k] = b[0] * t[0][k] + b[1] * t[1][k] + b[2] * t[2][k];
            r.bary.push_back(p);
            r.w.push_back(b[3] * scale);
        }
    return r;
}

}  // namespace detail

// Signed solid angle of triangle (a,b,c) seen from x, positive when x lies
// behind the triangle (opposite its ccw normal). Van Oosterom-Strackee.
inline double solid_angle(const Vec3d& x, const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    Vec3d r1 = a - x, r2 = b - x, r3 = c - x;
    double n1 = r1.norm(), n2 = r2.norm(), n3 = r3.norm();
    double num = r1.dot(r2.cross(r3));
    double den = n1 * n2 * n3 + r1.dot(r2) * n3 + r1.dot(r3) * n2 + r2.dot(r3) * n1;
    return 2.0 * std::atan2(num, den);
}

// Gradient of the solid angle above with respect to x: the edge loop acts
// as a unit vortex filament.
inline Vec3d solid_angle_grad(const Vec3d& x, const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    const std::array<Vec3d, 3> v{a, b, c};
    Vec3d g = Vec3d::Zero();
    for (int e = 0; e < 3; ++e) {
        Vec3d r1 = x - v[e], r2 = x - v[(e + 1) % 3];
        double n1 = r1.norm(), n2 = r2.norm();
        double den = n1 * n2 * (n1 * n2 + r1.dot(r2));
        if (std::abs(den) < 1e-300) continue;
        g += r1.cross(r2) * ((n1 + n2) / den);
    }
    return g;
}

// Direct boundary-integral formulation: for x on the surface,
//   Phi(x)/2 + (1/4pi) sum_l Omega_l(x) Phi_l = - int G(x,y) K(y) ds_y,
// with Phi piecewise constant, collocation at centroids and exact panel
// solid angles. Off the surface the same representation formula applies
// with the 1/2 replaced by 1.
class BemPotentials final : public Potentials {
public:
    struct Report {
        int panels = 0;
        std::array<int, 6> iterations{};
        std::array<double, 6> residual{};
    };

    explicit BemPotentials(std::shared_ptr<const TriMesh> mesh, double tol = 1e-12) : mesh_(std::move(mesh)) {
        const TriMesh& m = *mesh_;
        const std::size_t n = m.faces.size();
        cent_.resize(n);
        nrm_.resize(n);
        area_.resize(n);
        size_.resize(n);
        for (std::size_t f = 0; f < n; ++f) {
            cent_[f] = m.face_centroid(f);
            nrm_[f] = m.face_normal(f);
            area_[f] = m.face_area(f);
            size_[f] = std::sqrt(area_[f]);
        }
        rule1_ = detail::subdivided_rule(0);
        rule2_ = detail::subdivided_rule(2);
        rule3_ = detail::subdivided_rule(4);

        Eigen::MatrixXd A(n, n);
        Eigen::Matrix<double, Eigen::Dynamic, 6> rhs(n, 6);
        parallel_for(n, [&](std::size_t k) {
            Eigen::Matrix<double, 1, 6> acc = Eigen::Matrix<double, 1, 6>::Zero();
            for (std::size_t l = 0; l < n; ++l) {
                double s;
                Vec3d mom;
                if (l == k) {
                    A(k, l) = 0.5;
                    s = detail::inplane_inverse_distance(cent_[k], m.corner(k, 0), m.corner(k, 1), m.corner(k, 2)) /
                        (4 * std::numbers::pi);
                    mom = cent_[k] * s + panel_offset_moment(k);
                } else {
                    A(k, l) = solid_angle(cent_[k], m.corner(l, 0), m.corner(l, 1), m.corner(l, 2)) /
                              (4 * std::numbers::pi);
                    panel_single(l, cent_[k], s, mom);
                }
                for (int i = 0; i < 3; ++i) acc[i] -= s * nrm_[l][i];
                Vec3d rot = mom.cross(nrm_[l]);
                for (int i = 0; i < 3; ++i) acc[3 + i] -= rot[i];
            }
            rhs.row(k) = acc;
        });
        phi_.resize(6);
        report_.panels = static_cast<int>(n);
        Eigen::GMRES<Eigen::MatrixXd, Eigen::IdentityPreconditioner> gmres;
        gmres.setTolerance(tol);
        gmres.set_restart(200);
        gmres.setMaxIterations(2000);
        gmres.compute(A);
        for (int i = 0; i < 6; ++i) {
            Eigen::VectorXd b = rhs.col(i);
            if (b.norm() < 1e-14 * std::sqrt(double(n))) {
                phi_[i] = Eigen::VectorXd::Zero(n);
                continue;
            }
            phi_[i] = gmres.solve(b);
            report_.iterations[i] = static_cast<int>(gmres.iterations());
            report_.residual[i] = (A * phi_[i] - b).norm() / b.norm();
            if (gmres.info() != Eigen::Success || !(report_.residual[i] < 1e-8)) {
                Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
                phi_[i] = lu.solve(b);
                report_.residual[i] = (A * phi_[i] - b).norm() / b.norm();
                if (!(report_.residual[i] < 1e-8))
                    throw std::runtime_error("BEM solve failed for potential " + std::to_string(i + 1) +
                                             ", relative residual " + std::to_string(report_.residual[i]) +
                                             " (mesh degenerate or badly conditioned)");
            }
        }
    }

    const Report& report() const { return report_; }
    const std::vector<Vec3d>& centroids() const { return cent_; }
    const std::vector<Vec3d>& normals() const { return nrm_; }
    const std::vector<double>& areas() const { return area_; }
    const Eigen::VectorXd& surface_values(int i) const { return phi_[i]; }

    double phi(int i, const Vec3d& x) const override {
        const TriMesh& m = *mesh_;
        double v = 0;
        for (std::size_t l = 0; l < cent_.size(); ++l) {
            double s;
            Vec3d mom;
            panel_single(l, x, s, mom);
            double data = i < 3 ? s * nrm_[l][i] : mom.cross(nrm_[l])[i - 3];
            v += -phi_[i][l] * solid_angle(x, m.corner(l, 0), m.corner(l, 1), m.corner(l, 2)) /
                     (4 * std::numbers::pi) -
                 data;
        }
        return v;
    }
    Vec3d grad(int i, const Vec3d& x) const override {
        const TriMesh& m = *mesh_;
        Vec3d g = Vec3d::Zero();
        for (std::size_t l = 0; l < cent_.size(); ++l) {
            g -= phi_[i][l] * solid_angle_grad(x, m.corner(l, 0), m.corner(l, 1), m.corner(l, 2)) /
                 (4 * std::numbers::pi);
            g -= panel_single_grad(l, x, i);
        }
        return g;
    }
    Mat3 hess(int i, const Vec3d& x) const override {
        double h = 1e-5 * std::max(1.0, x.norm());
        Mat3 H;
        for (int k = 0; k < 3; ++k) {
            Vec3d e = Vec3d::Unit(k) * h;
            H.col(k) = (grad(i, x + e) - grad(i, x - e)) / (2 * h);
        }
        return 0.5 * (H + H.transpose());
    }
    std::string method() const override { return "bem-direct-collocation"; }

private:
    std::shared_ptr<const TriMesh> mesh_;
    std::vector<Vec3d> cent_, nrm_;
    std::vector<double> area_, size_;
    std::vector<Eigen::VectorXd> phi_;
    detail::Subrule rule1_, rule2_, rule3_;
    Report report_;

    const detail::Subrule& pick(std::size_t l, const Vec3d& x) const {
        double d = (x - cent_[l]).norm() / size_[l];
        if (d > 6) return rule1_;
        if (d > 2) return rule2_;
        return rule3_;
    }

    // s = int_T G(x,y) dy, mom = int_T G(x,y) y dy
    void panel_single(std::size_t l, const Vec3d& x, double& s, Vec3d& mom) const {
        const auto& r = pick(l, x);
        Vec3d a = mesh_->corner(l, 0), b = mesh_->corner(l, 1), c = mesh_->corner(l, 2);
        s = 0;
        mom.setZero();
        for (std::size_t q = 0; q < r.w.size(); ++q) {
            Vec3d y = r.bary[q][0] * a + r.bary[q][1] * b + r.bary[q][2] * c;
            double g = r.w[q] / (x - y).norm();
            s += g;
            mom += g * y;
        }
        double f = area_[l] / (4 * std::numbers::pi);
        s *= f;
        mom *= f;
    }

    // gradient in x of int_T G(x,y) K_i(y) dy. Near the panel K_i is split
    // at the foot point p of x: the constant part in closed form, only the
    // linear remainder (an O(1/r) integrand) by quadrature.
    Vec3d panel_single_grad(std::size_t l, const Vec3d& x, int i) const {
        const auto& r = pick(l, x);
        Vec3d a = mesh_->corner(l, 0), b = mesh_->corner(l, 1), c = mesh_->corner(l, 2);
        const Vec3d& n = nrm_[l];
        const bool near = &r == &rule3_;
        double k0 = 0;
        Vec3d g = Vec3d::Zero();
        if (near) {
            k0 = neumann_data(i, x - (x - a).dot(n) * n, n);
            g = k0 * 4 * std::numbers::pi * constant_single_grad(x, a, b, c, n) / area_[l];
        }
        for (std::size_t q = 0; q < r.w.size(); ++q) {
            Vec3d y = r.bary[q][0] * a + r.bary[q][1] * b + r.bary[q][2] * c;
            Vec3d d = x - y;
            double dn = d.norm();
            double k = neumann_data(i, y, n) - k0;
            g -= r.w[q] * k * d / (dn * dn * dn);
        }
        return g * area_[l] / (4 * std::numbers::pi);
    }

    // grad_x int_T dy / (4 pi |x - y|): edge logarithms for the in-plane
    // part, the solid angle for the normal part
    static Vec3d constant_single_grad(const Vec3d& x, const Vec3d& a, const Vec3d& b, const Vec3d& c, const Vec3d& n) {
        const std::array<Vec3d, 3> v{a, b, c};
        Vec3d g = solid_angle(x, a, b, c) * n;
        for (int e = 0; e < 3; ++e) {
            Vec3d v0 = v[e], v1 = v[(e + 1) % 3];
            Vec3d t = (v1 - v0).normalized();
            Vec3d m = t.cross(n);
            double sm = (v0 - x).dot(t), sp = (v1 - x).dot(t);
            double rm = (v0 - x).norm(), rp = (v1 - x).norm();
            double num = sp + rp, den = sm + rm;
            if (num <= 0 || den <= 0) continue;  // x on the edge's line
            g -= m * std::log(num / den);
        }
        return g / (4 * std::numbers::pi);
    }

    // int_T G(x_c, y) (y - x_c) dy at the panel's own centroid: bounded integrand
    Vec3d panel_offset_moment(std::size_t l) const {
        Vec3d a = mesh_->corner(l, 0), b = mesh_->corner(l, 1), c = mesh_->corner(l, 2);
        Vec3d mom = Vec3d::Zero();
        for (std::size_t q = 0; q < rule3_.w.size(); ++q) {
            Vec3d y = rule3_.bary[q][0] * a + rule3_.bary[q][1] * b + rule3_.bary[q][2] * c;
            Vec3d d = y - cent_[l];
            double dn = d.norm();
            if (dn > 1e-12 * size_[l]) mom += rule3_.w[q] * d / dn;  // the centroid node carries no direction
        }
        return mom * area_[l] / (4 * std::numbers::pi);
    }
};

inline std::shared_ptr<const Potentials> solve_kirchhoff(const RigidBodySpec& spec) {
    if (spec.is_sphere()) return std::make_shared<SpherePotentials>(spec.radius);
    return std::make_shared<BemPotentials>(spec.mesh);
}

}  // namespace rigidflow::kirchhoff
