#pragma once

#include <memory>
#include <stdexcept>

#include "rigidflow/core/jet.hpp"
#include "rigidflow/geometry/body.hpp"
#include "rigidflow/geometry/bvh.hpp"

namespace rigidflow::geometry {

// quintic smoothstep bump: 1 for t <= 0, 0 for t >= 1, C2 at both ends
template <class S>
S quintic_bump(const S& t) {
    if (t <= 0.0) return S(1.0);
    if (t >= 1.0) return S(0.0);
    S t3 = t * t * t;
    return 1.0 - t3 * (10.0 - 15.0 * t + 6.0 * t * t);
}

class CutoffField {
public:
    CutoffField() = default;
    CutoffField(const RigidBodySpec& spec, double c) : c_(c) {
        if (!(c > 0)) throw std::invalid_argument("cutoff: width must be > 0");
        if (spec.is_sphere()) {
            a_ = spec.radius;
        } else {
            mesh_ = spec.mesh;
            bvh_ = std::make_shared<Bvh>(*mesh_);
        }
    }

    double width() const { return c_; }
    bool analytic() const { return !mesh_; }

    // signed distance, positive in the fluid
    double distance(const Vec3d& x) const {
        if (analytic()) return x.norm() - a_;
        auto h = bvh_->closest(x);
        Vec3d n = mesh_->face_normal(h.face);
        return (x - h.point).dot(n) >= 0 ? h.dist : -h.dist;
    }

    // sphere only: templated so jets give exact derivatives
    template <class S>
    S operator()(const Vec3<S>& x) const {
        using std::sqrt;
        S d = sqrt(norm2(x)) - a_;
        return quintic_bump((d - c_) / c_);
    }

    double value(const Vec3d& x) const {
        if (analytic()) return (*this)(from_eigen(x));
        return quintic_bump((distance(x) - c_) / c_);
    }

    Vec3d gradient(const Vec3d& x) const {
        if (analytic()) return eval_scalar_grad(*this, x).second;
        double h = 1e-6 * std::max(1.0, c_);
        Vec3d g;
        for (int k = 0; k < 3; ++k) {
            Vec3d e = Vec3d::Unit(k) * h;
            g[k] = (value(x + e) - value(x - e)) / (2 * h);
        }
        return g;
    }

private:
    double c_ = 0.1;
    double a_ = 1.0;
    std::shared_ptr<const TriMesh> mesh_;
    std::shared_ptr<Bvh> bvh_;
};

// chi_R(x) = x inside B(0,R) and R x/|x| outside.
class TruncationField {
public:
    TruncationField() = default;
    explicit TruncationField(double R) : R_(R) {
        if (!(R > 0)) throw std::invalid_argument("truncation: radius must be > 0");
    }
    double radius() const { return R_; }

    template <class S>
    Vec3<S> operator()(const Vec3<S>& x) const {
        using std::sqrt;
        S r2 = norm2(x);
        if (r2 <= R_ * R_) return x;
        return x * (R_ / sqrt(r2));
    }
    Vec3d operator()(const Vec3d& x) const {
        double r = x.norm();
        return r <= R_ ? x : Vec3d(x * (R_ / r));
    }

private:
    double R_ = 1e300;
};

}  // namespace rigidflow::geometry
