#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rigidflow/core/harmonics.hpp"
#include "rigidflow/euler/particles.hpp"
#include "rigidflow/forms/forms.hpp"
#include "rigidflow/kirchhoff/added_mass.hpp"
#include "rigidflow/kirchhoff/test_fields.hpp"

namespace rigidflow::euler {

using kirchhoff::Mat6;
using kirchhoff::Vec6;

// Everything about the body that the reconstruction reuses between steps.
struct EulerGeometry {
    kirchhoff::KirchhoffContext k;
    forms::FormsContext ctx;                  // fluid rule for energy and the body forcing
    geometry::SurfaceRule projection;         // image and correction projection nodes
    std::vector<Vec3d> check_nodes, check_normals;
    std::vector<forms::Sampled> v;            // v_1..v_6 on ctx.quad
    int image_degree = 0;                     // 0: no harmonic image (non-spherical body)
    double radius = 0;                        // sphere radius when image_degree > 0

    bool sphere() const { return image_degree > 0; }
};

inline double rigid_energy(const EulerGeometry& g, const Vec3d& ell, const Vec3d& rot) {
    return g.k.M1(0, 0) * ell.squaredNorm() + (g.k.M1.bottomRightCorner<3, 3>() * rot).dot(rot);
}

// n points spread over the unit sphere (golden-angle spiral)
inline std::vector<Vec3d> spiral_points(int n) {
    std::vector<Vec3d> p;
    const double ga = M_PI * (3 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double z = 1 - (2.0 * i + 1) / n;
        double rr = std::sqrt(std::max(0.0, 1 - z * z));
        p.emplace_back(rr * std::cos(ga * i), rr * std::sin(ga * i), z);
    }
    return p;
}

inline EulerGeometry make_euler_geometry(const kirchhoff::KirchhoffContext& k, const forms::FormsContext& ctx,
                                         int image_degree = 24, int check_count = 400) {
    EulerGeometry g;
    g.k = k;
    g.ctx = ctx;
    if (k.spec.is_sphere()) {
        if (image_degree < 2) throw std::invalid_argument("euler: image degree must be >= 2 on a sphere");
        g.image_degree = image_degree;
        g.radius = k.spec.radius;
        int nt = image_degree + 2;
        g.projection = geometry::sphere_directions(nt, 2 * nt);
        for (std::size_t i = 0; i < g.projection.size(); ++i) {
            g.projection.n[i] = g.projection.x[i];
            g.projection.x[i] *= g.radius;
            g.projection.w[i] *= g.radius * g.radius;
        }
        for (const auto& d : spiral_points(check_count)) {
            g.check_nodes.push_back(g.radius * d);
            g.check_normals.push_back(d);
        }
    } else {
        g.projection = ctx.quad.surface;
        // check at panel centroids, which the projection rule does not use
        const auto& m = *k.spec.mesh;
        for (std::size_t f = 0; f < m.faces.size(); f += std::max<std::size_t>(1, m.faces.size() / check_count)) {
            g.check_nodes.push_back(m.face_centroid(f));
            g.check_normals.push_back(m.face_normal(f));
        }
    }
    auto vi = kirchhoff::rigid_test_fields(k);
    for (const auto& f : vi) g.v.push_back(forms::sample(f, ctx.quad));
    return g;
}

// u = Biot-Savart(particles) + grad(image) + sum beta_i grad Phi_i with
// u.n = (l + r ^ x).n on the body. On a sphere the image carries degrees
// 2..L of the normal trace exactly; beta carries the rest by least squares
// against the Neumann data K_i.
class Reconstruction {
public:
    Reconstruction(const EulerGeometry& g, const VortexField& w, const Vec3d& ell, const Vec3d& rot)
        : g_(&g), w_(&w), ell_(ell), rot_(rot) {
        const auto& P = g.projection;
        std::vector<double> un(P.size());
        parallel_for(P.size(), [&](std::size_t s) { un[s] = biot_savart(w, P.x[s]).dot(P.n[s]); });
        if (g.sphere()) fit_image(un);
        // residual normal data after the image
        std::vector<double> res(P.size());
        for (std::size_t s = 0; s < P.size(); ++s) {
            double img = g.sphere() ? image_gradient(P.x[s]).dot(P.n[s]) : 0.0;
            res[s] = (ell + rot.cross(P.x[s])).dot(P.n[s]) - un[s] - img;
        }
        // normal equations on the non-vanishing potentials
        std::vector<int> act;
        for (int i = 0; i < 6; ++i)
            if (!g.k.potentials->vanishes(i)) act.push_back(i);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(act.size(), act.size());
        Eigen::VectorXd b = Eigen::VectorXd::Zero(act.size());
        for (std::size_t s = 0; s < P.size(); ++s) {
            Vec6 K;
            for (int i = 0; i < 6; ++i) K[i] = kirchhoff::neumann_data(i, P.x[s], P.n[s]);
            for (std::size_t a = 0; a < act.size(); ++a) {
                b[a] += P.w[s] * K[act[a]] * res[s];
                for (std::size_t c = 0; c < act.size(); ++c) A(a, c) += P.w[s] * K[act[a]] * K[act[c]];
            }
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (act.size() && (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 1e-14 * A.norm())))
            throw std::runtime_error("euler: boundary correction system is singular");
        Eigen::VectorXd x = act.empty() ? Eigen::VectorXd() : Eigen::VectorXd(ldlt.solve(b));
        // vanishing potentials carry no field; record the rigid coefficient
        for (int i = 0; i < 6; ++i) beta_[i] = i < 3 ? ell[i] : rot[i - 3];
        for (std::size_t a = 0; a < act.size(); ++a) beta_[act[a]] = x[a];
    }

    const Vec6& beta() const { return beta_; }
    const Vec3d& ell() const { return ell_; }
    const Vec3d& rot() const { return rot_; }

    Vec3d velocity(const Vec3d& x) const {
        Vec3d u = biot_savart(*w_, x);
        if (g_->sphere()) u += image_gradient(x);
        for (int i = 0; i < 6; ++i)
            if (!g_->k.potentials->vanishes(i)) u += beta_[i] * g_->k.potentials->grad(i, x);
        return u;
    }

    Sample velocity_grad(const Vec3d& x) const {
        Sample s = biot_savart_grad(*w_, x);
        if (g_->sphere()) {
            auto j = image_hessian(x);
            s.u += j.first;
            s.grad += j.second;
        }
        for (int i = 0; i < 6; ++i)
            if (!g_->k.potentials->vanishes(i)) {
                s.u += beta_[i] * g_->k.potentials->grad(i, x);
                s.grad += beta_[i] * g_->k.potentials->hess(i, x);
            }
        return s;
    }

    // max |(u - u_S).n| over the check nodes
    double bc_residual() const {
        const auto& X = g_->check_nodes;
        std::vector<double> r(X.size());
        parallel_for(X.size(), [&](std::size_t i) {
            r[i] = std::abs((velocity(X[i]) - ell_ - rot_.cross(X[i])).dot(g_->check_normals[i]));
        });
        return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
    }

    int image_degree_used() const { return L_; }

private:
    // image potential sum_{l>=2} d_lm R_lm(x) / |x|^(2l+1)
    template <class S>
    S image_potential(const Vec3<S>& x) const {
        using std::sqrt;
        std::vector<S> R;
        solid_harmonics(x, L_, R);
        S r2 = norm2(x);
        S inv = 1.0 / r2;
        S rr = sqrt(r2);
        S fac = 1.0 / (rr * r2 * r2);  // |x|^-5 for l = 2
        S phi(0.0);
        for (int l = 2; l <= L_; ++l) {
            S acc(0.0);
            for (int m = -l; m <= l; ++m) acc = acc + coef_[sh_index(l, m)] * R[sh_index(l, m)];
            phi = phi + acc * fac;
            fac = fac * inv;
        }
        return phi;
    }

    Vec3d image_gradient(const Vec3d& x) const {
        if (L_ < 2) return Vec3d::Zero();
        using J1 = Jet<double, 3>;
        Vec3<J1> xj;
        for (int k = 0; k < 3; ++k) {
            xj[k].v = x[k];
            xj[k].d[k] = 1.0;
        }
        J1 p = image_potential(xj);
        return Vec3d(p.d[0], p.d[1], p.d[2]);
    }

    std::pair<Vec3d, Mat3> image_hessian(const Vec3d& x) const {
        if (L_ < 2) return {Vec3d::Zero(), Mat3::Zero()};
        using J1 = Jet<double, 3>;
        using J2 = Jet<J1, 3>;
        Vec3<J2> xj;
        for (int k = 0; k < 3; ++k) {
            xj[k].v.v = x[k];
            xj[k].v.d[k] = 1.0;
            xj[k].d[k].v = 1.0;
        }
        J2 p = image_potential(xj);
        Vec3d g;
        Mat3 H;
        for (int a = 0; a < 3; ++a) {
            g[a] = p.d[a].v;
            for (int b = 0; b < 3; ++b) H(a, b) = p.d[a].d[b];
        }
        return {g, H};
    }

    // d_lm from the unit-sphere coefficients g_lm of -u_BS.n:
    // d/dr of |x|^-(l+1) Y_lm at r = a gives -(l+1)/a, hence
    // d_lm = -a^(l+2) g_lm / (l+1).
    void fit_image(const std::vector<double>& un) {
        const int L = g_->image_degree;
        const double a = g_->radius;
        const auto& P = g_->projection;
        std::vector<double> gl(sh_count(L), 0.0);
        for (std::size_t s = 0; s < P.size(); ++s) {
            std::vector<double> Y;
            solid_harmonics(from_eigen(P.n[s]), L, Y);
            double wu = P.w[s] / (a * a) * (-un[s]);
            for (int i = 0; i < sh_count(L); ++i) gl[i] += wu * Y[i];
        }
        coef_.assign(sh_count(L), 0.0);
        double gmax = 0;
        for (int l = 2; l <= L; ++l)
            for (int m = -l; m <= l; ++m) gmax = std::max(gmax, std::abs(gl[sh_index(l, m)]));
        L_ = 1;
        for (int l = 2; l <= L; ++l) {
            double al = std::pow(a, l + 2);
            bool any = false;
            for (int m = -l; m <= l; ++m) {
                double c = gl[sh_index(l, m)];
                coef_[sh_index(l, m)] = -al * c / (l + 1);
                any = any || std::abs(c) > 1e-15 * gmax;
            }
            if (any) L_ = l;
        }
    }

    const EulerGeometry* g_;
    const VortexField* w_;
    Vec3d ell_, rot_;
    Vec6 beta_ = Vec6::Zero();
    std::vector<double> coef_;
    int L_ = 1;
};

}  // namespace rigidflow::euler
