#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rigidflow/core/vec.hpp"

namespace rigidflow::motion {

// exp of the skew map of w (Rodrigues)
inline Mat3 exp_so3(const Vec3d& w) {
    double th = w.norm();
    Mat3 K = skew(w);
    double a, b;
    if (th < 1e-6) {
        double t2 = th * th;
        a = 1 - t2 / 6 + t2 * t2 / 120;
        b = 0.5 - t2 / 24 + t2 * t2 / 720;
    } else {
        a = std::sin(th) / th;
        b = (1 - std::cos(th)) / (th * th);
    }
    return Mat3::Identity() + a * K + b * K * K;
}

inline Vec3d log_so3(const Mat3& Q) {
    double c = std::clamp((Q.trace() - 1) / 2, -1.0, 1.0);
    double th = std::acos(c);
    Vec3d v(Q(2, 1) - Q(1, 2), Q(0, 2) - Q(2, 0), Q(1, 0) - Q(0, 1));
    if (th < 1e-6) return 0.5 * v;
    if (M_PI - th < 1e-6) {
        // near pi: axis from the symmetric part
        Mat3 B = 0.5 * (Q + Mat3::Identity());
        int k;
        B.diagonal().maxCoeff(&k);
        Vec3d axis = B.col(k) / std::sqrt(std::max(B(k, k), 1e-300));
        return th * axis.normalized();
    }
    return th / (2 * std::sin(th)) * v;
}

// nearest rotation in Frobenius norm (polar factor)
inline Mat3 reorthonormalize(const Mat3& Q) {
    Eigen::JacobiSVD<Mat3> svd(Q, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 R = svd.matrixU() * svd.matrixV().transpose();
    if (R.determinant() < 0) {
        Mat3 U = svd.matrixU();
        U.col(2) *= -1;
        R = U * svd.matrixV().transpose();
    }
    return R;
}

struct Frame {
    Vec3d h = Vec3d::Zero();
    Mat3 Q = Mat3::Identity();
    Vec3d hdot = Vec3d::Zero();  // h' = Q l
    Vec3d R = Vec3d::Zero();     // R = Q r
};

struct BodyMotion {
    std::vector<double> t;
    std::vector<Vec3d> ell, rot, h;
    std::vector<Mat3> Q;

    std::size_t size() const { return t.size(); }

    double orthogonality_defect() const {
        double e = 0;
        for (const auto& q : Q) e = std::max(e, (q.transpose() * q - Mat3::Identity()).norm());
        return e;
    }

    Frame frame(std::size_t n) const { return {h[n], Q[n], Q[n] * ell[n], Q[n] * rot[n]}; }

    // linear in h, l, r; geodesic in Q
    Frame frame_at(double s) const {
        if (t.empty()) throw std::out_of_range("motion: empty trajectory");
        double tol = 1e-12 * std::max(1.0, std::abs(t.back()));
        if (s < t.front() - tol || s > t.back() + tol) throw std::out_of_range("motion: time outside the sampled range");
        auto it = std::upper_bound(t.begin(), t.end(), s);
        std::size_t n = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
        if (n + 1 >= t.size()) return frame(t.size() - 1);
        double th = (s - t[n]) / (t[n + 1] - t[n]);
        Frame f;
        f.h = (1 - th) * h[n] + th * h[n + 1];
        f.Q = Q[n] * exp_so3(th * log_so3(Q[n].transpose() * Q[n + 1]));
        Vec3d l = (1 - th) * ell[n] + th * ell[n + 1];
        Vec3d r = (1 - th) * rot[n] + th * rot[n + 1];
        f.hdot = f.Q * l;
        f.R = f.Q * r;
        return f;
    }
};

// Q' = Q skew(r) (equivalently Q'x = R ^ Qx with R = Q r), h' = Q l.
// Each substep multiplies by exp of the midpoint rotation increment and
// projects back onto SO(3); h uses the trapezoid rule.
inline BodyMotion reconstruct_world_frame(const std::vector<double>& t, const std::vector<Vec3d>& ell,
                                          const std::vector<Vec3d>& rot) {
    if (t.size() != ell.size() || t.size() != rot.size()) throw std::invalid_argument("motion: sample arrays differ in length");
    BodyMotion m;
    m.t = t;
    m.ell = ell;
    m.rot = rot;
    if (t.empty()) return m;
    m.h.push_back(Vec3d::Zero());
    m.Q.push_back(Mat3::Identity());
    for (std::size_t n = 0; n + 1 < t.size(); ++n) {
        double dt = t[n + 1] - t[n];
        if (!(dt > 0)) throw std::invalid_argument("motion: times must increase");
        Mat3 Qn = reorthonormalize(m.Q[n] * exp_so3(0.5 * dt * (rot[n] + rot[n + 1])));
        m.h.push_back(m.h[n] + 0.5 * dt * (m.Q[n] * ell[n] + Qn * ell[n + 1]));
        m.Q.push_back(Qn);
    }
    return m;
}

using VectorField = std::function<Vec3d(const Vec3d&)>;

// U(y) = Q u(Q^T (y - h))
inline VectorField to_world_frame(VectorField u, const Frame& f) {
    return [u = std::move(u), f](const Vec3d& y) -> Vec3d { return f.Q * u(f.Q.transpose() * (y - f.h)); };
}
// u(x) = Q^T U(Q x + h)
inline VectorField to_body_frame(VectorField U, const Frame& f) {
    return [U = std::move(U), f](const Vec3d& x) -> Vec3d { return f.Q.transpose() * U(f.Q * x + f.h); };
}

// at a sampled time; throws outside the sampled range
inline VectorField to_world_frame(VectorField u, const BodyMotion& m, double t) {
    return to_world_frame(std::move(u), m.frame_at(t));
}
inline VectorField to_body_frame(VectorField U, const BodyMotion& m, double t) {
    return to_body_frame(std::move(U), m.frame_at(t));
}

// world velocity of the rigid motion: h' + R ^ (y - h)
inline Vec3d rigid_world_velocity(const Frame& f, const Vec3d& y) { return f.hdot + f.R.cross(y - f.h); }

// J(t) = Q J0 Q^T
inline Mat3 world_inertia(const Mat3& J0, const Mat3& Q) { return Q * J0 * Q.transpose(); }

}  // namespace rigidflow::motion
