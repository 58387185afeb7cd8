#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rigidflow/geometry/mesh.hpp"

namespace rigidflow::geometry {

// Either a sphere centred at the origin (density piecewise constant over
// concentric shells) or a closed triangle mesh (density piecewise constant
// over the cones joining cell_apex to each face).
struct RigidBodySpec {
    enum class Kind { Sphere, Mesh };
    Kind kind = Kind::Sphere;

    double radius = 1.0;
    std::vector<double> shell_outer{1.0};  // increasing, last == radius
    std::vector<double> shell_density{1.0};

    std::shared_ptr<const TriMesh> mesh;
    std::vector<double> face_density;  // size 1 (uniform) or one per face
    Vec3d cell_apex = Vec3d::Zero();

    double inertia_scale = 1.0;

    static RigidBodySpec sphere(double a, double rho = 1.0) {
        RigidBodySpec s;
        s.kind = Kind::Sphere;
        s.radius = a;
        s.shell_outer = {a};
        s.shell_density = {rho};
        return s;
    }
    static RigidBodySpec layered_sphere(std::vector<double> outer, std::vector<double> rho) {
        RigidBodySpec s;
        s.kind = Kind::Sphere;
        s.radius = outer.empty() ? 0.0 : outer.back();
        s.shell_outer = std::move(outer);
        s.shell_density = std::move(rho);
        return s;
    }
    static RigidBodySpec from_mesh(TriMesh m, double rho = 1.0) {
        RigidBodySpec s;
        s.kind = Kind::Mesh;
        s.mesh = std::make_shared<const TriMesh>(std::move(m));
        s.face_density = {rho};
        return s;
    }

    bool is_sphere() const { return kind == Kind::Sphere; }

    double rho_face(std::size_t f) const {
        return inertia_scale * (face_density.size() == 1 ? face_density[0] : face_density[f]);
    }

    // smallest R0 with the body inside B(0, R0/2), measured from the origin
    double bounding_radius() const {
        if (is_sphere()) return radius;
        double r = 0;
        for (const auto& v : mesh->vertices) r = std::max(r, v.norm());
        return r;
    }
    double diameter() const {
        if (is_sphere()) return 2.0 * radius;
        Vec3d lo = mesh->vertices[0], hi = lo;
        for (const auto& v : mesh->vertices) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        return (hi - lo).norm();
    }

    void validate() const {
        if (!(inertia_scale > 0)) throw std::invalid_argument("body: inertia_scale must be > 0");
        if (is_sphere()) {
            if (!(radius > 0)) throw std::invalid_argument("body: radius must be > 0");
            if (shell_outer.empty() || shell_outer.size() != shell_density.size())
                throw std::invalid_argument("body: shell radii/densities mismatch");
            double prev = 0;
            for (std::size_t k = 0; k < shell_outer.size(); ++k) {
                if (!(shell_outer[k] > prev)) throw std::invalid_argument("body: shell radii must increase");
                if (!(shell_density[k] > 0)) throw std::invalid_argument("body: density must be > 0");
                prev = shell_outer[k];
            }
            if (std::abs(prev - radius) > 1e-14 * radius) throw std::invalid_argument("body: outer shell != radius");
            return;
        }
        if (!mesh) throw std::invalid_argument("body: missing mesh");
        validate(*mesh);
        if (face_density.size() != 1 && face_density.size() != mesh->faces.size())
            throw std::invalid_argument("body: face density count mismatch");
        for (double d : face_density)
            if (!(d > 0)) throw std::invalid_argument("body: density must be > 0");
    }

private:
    static void validate(const TriMesh& m) { geometry::validate(m); }
};

struct Inertia {
    double m = 0;
    Vec3d h0 = Vec3d::Zero();
    Mat3 J = Mat3::Zero();
};

// Closed-form moments: shells for spheres, signed tetrahedra for meshes.
inline Inertia compute_inertia(const RigidBodySpec& spec) {
    spec.validate();
    Inertia out;
    if (spec.is_sphere()) {
        double prev = 0, m = 0, j = 0;
        for (std::size_t k = 0; k < spec.shell_outer.size(); ++k) {
            double r = spec.shell_outer[k], rho = spec.inertia_scale * spec.shell_density[k];
            m += rho * 4.0 / 3.0 * std::numbers::pi * (r * r * r - prev * prev * prev);
            j += rho * 8.0 / 15.0 * std::numbers::pi * (std::pow(r, 5) - std::pow(prev, 5));
            prev = r;
        }
        out.m = m;
        out.J = j * Mat3::Identity();
        return out;
    }
    const TriMesh& mesh = *spec.mesh;
    double m = 0;
    Vec3d first = Vec3d::Zero();
    Mat3 second = Mat3::Zero();  // integral of rho x x^T
    const Vec3d& o = spec.cell_apex;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        Vec3d a = mesh.corner(f, 0), b = mesh.corner(f, 1), c = mesh.corner(f, 2);
        double vol = det3(a - o, b - o, c - o) / 6.0;
        double rho = spec.rho_face(f);
        Vec3d s = o + a + b + c;
        m += rho * vol;
        first += rho * vol * s / 4.0;
        Mat3 cov = o * o.transpose() + a * a.transpose() + b * b.transpose() + c * c.transpose() + s * s.transpose();
        second += rho * vol / 20.0 * cov;
    }
    if (!(m > 0)) throw std::invalid_argument("body: zero mass (degenerate mesh)");
    out.m = m;
    out.h0 = first / m;
    Mat3 c = second - m * out.h0 * out.h0.transpose();
    out.J = c.trace() * Mat3::Identity() - c;
    out.J = 0.5 * (out.J + out.J.transpose()).eval();
    return out;
}

// Body shifted so that its centre of mass sits at the origin; the body-frame
// equations assume h0 = 0.
inline RigidBodySpec centered(const RigidBodySpec& spec) {
    if (spec.is_sphere()) return spec;
    Inertia in = compute_inertia(spec);
    RigidBodySpec s = spec;
    TriMesh m = *spec.mesh;
    m.translate(-in.h0);
    s.mesh = std::make_shared<const TriMesh>(std::move(m));
    s.cell_apex = spec.cell_apex - in.h0;
    return s;
}

}  // namespace rigidflow::geometry
