#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidflow/euler/energy.hpp"
#include "rigidflow/euler/reconstruct.hpp"

namespace rigidflow::euler {

struct EulerState {
    double t = 0;
    VortexField field;
    Vec3d ell = Vec3d::Zero(), rot = Vec3d::Zero();
    Vec6 beta = Vec6::Zero();
};

struct EulerParams {
    double T = 0.25;
    double dt = 0.05;
    int max_reflections = 0;  // more than this fails the run
    bool keep_snapshots = true;
    // On a sphere the forcing and the energy use rules refined around the
    // particles (rebuilt as they move); other bodies use the context rule.
    bool adapted = true;
    AdaptedRuleOptions forcing_rule{4, 3, 2.0, 5.0, 0.5, 0.4, 64, 4.0, 10};
    AdaptedRuleOptions energy_rule{};
    int energy_every = 1;  // measure ||u||_H^2 every n-th record (0: never)
    bool frozen_body = false;  // fixed obstacle: l = r = 0 throughout
};

// Per accepted step: energy ||u||_H^2, boundary residual, body forcing.
struct EulerRecord {
    double t = 0;
    Vec3d ell = Vec3d::Zero(), rot = Vec3d::Zero();
    Vec6 beta = Vec6::Zero();
    Vec6 forcing = Vec6::Zero();  // (b(u,u,v_i))_i
    Vec6 rate = Vec6::Zero();     // [l; r]' from the added-mass equation
    double energy = std::numeric_limits<double>::quiet_NaN();
    double bc_residual = 0;
    std::size_t particles = 0;
};

struct EulerTrajectory {
    std::vector<EulerRecord> rows;
    std::vector<VortexField> snapshots;  // particles at each row, if kept
    int reflections = 0;

    double energy_drift() const {
        double e0 = std::numeric_limits<double>::quiet_NaN(), d = 0;
        for (const auto& r : rows) {
            if (std::isnan(r.energy)) continue;
            if (std::isnan(e0)) e0 = r.energy;
            d = std::max(d, std::abs(r.energy - e0));
        }
        return (e0 > 0) ? d / e0 : d;
    }
    double max_bc_residual() const {
        double d = 0;
        for (const auto& r : rows) d = std::max(d, r.bc_residual);
        return d;
    }
};

class EulerFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Time derivative of the coupled system at a state.
struct EulerRate {
    std::vector<Vec3d> dx, dalpha;
    Vec6 dbody = Vec6::Zero();
    Vec6 forcing = Vec6::Zero();  // (b(u,u,v_i))_i
    Vec6 beta = Vec6::Zero();
};

// b(u, u, v_i) = [m l ^ r; (J r) ^ r]_i + int_F [grad v_i (u - u_S)].u - det(r, u, v_i)
// on a rule; v_i comes from the potentials unless samples are supplied.
inline Vec6 body_forcing(const EulerGeometry& g, const Reconstruction& rec, const geometry::VolumeRule& rule,
                         const std::vector<forms::Sampled>* v = nullptr) {
    const Vec3d ell = rec.ell(), rot = rec.rot();
    const double m = g.k.M1(0, 0);
    const Mat3 J = g.k.M1.bottomRightCorner<3, 3>();
    Vec6 f;
    f.head<3>() = m * ell.cross(rot);
    f.tail<3>() = (J * rot).cross(rot);
    std::vector<int> act;
    for (int i = 0; i < 6; ++i)
        if (!g.k.potentials->vanishes(i)) act.push_back(i);
    if (act.empty()) return f;
    std::vector<Vec6> part(rule.size());
    parallel_for(rule.size(), [&](std::size_t q) {
        const Vec3d& x = rule.x[q];
        Vec3d u = rec.velocity(x);
        Vec3d rel = u - ell - rot.cross(x);
        Vec6 c = Vec6::Zero();
        for (int i : act) {
            Vec3d vi = v ? (*v)[i].vol[q].u : g.k.potentials->grad(i, x);
            Mat3 gi = v ? (*v)[i].vol[q].grad : g.k.potentials->hess(i, x);
            c[i] = rule.w[q] * ((gi * rel).dot(u) - det3(rot, u, vi));
        }
        part[q] = c;
    });
    // fixed-order reduction
    Vec6 s = Vec6::Zero();
    for (const auto& c : part) s += c;
    return f + s;
}

inline EulerRate euler_rate(const EulerGeometry& g, const EulerParams& p, const VortexField& w, const Vec3d& ell,
                            const Vec3d& rot, double* bc_residual = nullptr) {
    Reconstruction rec(g, w, ell, rot);
    EulerRate r;
    r.beta = rec.beta();
    const std::size_t np = w.size();
    r.dx.resize(np);
    r.dalpha.resize(np);
    parallel_for(np, [&](std::size_t q) {
        Sample s = rec.velocity_grad(w.x[q]);
        r.dx[q] = s.u - ell - rot.cross(w.x[q]);
        r.dalpha[q] = s.grad * w.alpha[q] - rot.cross(w.alpha[q]);
    });
    if (g.sphere() && p.adapted) {
        r.forcing = body_forcing(g, rec, adapted_fluid_rule(g.radius, w, p.forcing_rule));
    } else {
        r.forcing = body_forcing(g, rec, g.ctx.quad.fluid, &g.v);
    }
    if (!p.frozen_body) {
        Eigen::FullPivLU<Mat6> lu(g.k.M);
        if (!lu.isInvertible()) throw EulerFailure("euler: added-mass matrix is singular");
        r.dbody = lu.solve(r.forcing);
    }
    if (bc_residual) *bc_residual = rec.bc_residual();
    return r;
}

inline double euler_energy(const EulerGeometry& g, const EulerParams& p, const VortexField& w, const Vec3d& ell,
                           const Vec3d& rot) {
    if (g.sphere() && p.adapted) return measure_energy(g, w, ell, rot, adapted_fluid_rule(g.radius, w, p.energy_rule));
    return measure_energy(g, w, ell, rot, g.ctx.quad.fluid);
}

// push particles that crossed the boundary back into the fluid
inline int reflect_particles(const EulerGeometry& g, VortexField& w) {
    int count = 0;
    for (auto& x : w.x) {
        if (g.sphere()) {
            double r = x.norm();
            if (r < g.radius) {
                x *= (2 * g.radius - r) / std::max(r, 1e-300);
                ++count;
            }
        } else {
            double d = g.ctx.chi.distance(x);
            if (d < 0) {
                Vec3d n;
                double h = 1e-6;
                for (int k = 0; k < 3; ++k)
                    n[k] = (g.ctx.chi.distance(x + h * Vec3d::Unit(k)) - g.ctx.chi.distance(x - h * Vec3d::Unit(k))) / (2 * h);
                x -= 2 * d * n.normalized();
                ++count;
            }
        }
    }
    return count;
}

inline EulerState advance(const EulerState& s, const EulerRate& k, double h) {
    EulerState o = s;
    for (std::size_t p = 0; p < s.field.size(); ++p) {
        o.field.x[p] += h * k.dx[p];
        o.field.alpha[p] += h * k.dalpha[p];
    }
    o.ell += h * k.dbody.head<3>();
    o.rot += h * k.dbody.tail<3>();
    o.t += h;
    return o;
}

// One RK4 step of particles and body together; the velocity is rebuilt at
// every stage. Returns the stage-1 rate (energy, forcing, residual at s).
inline EulerState rk4_step(const EulerGeometry& g, const EulerParams& p, const EulerState& s, double h, EulerRate& k1,
                            double& bc) {
    k1 = euler_rate(g, p, s.field, s.ell, s.rot, &bc);
    EulerState s2 = advance(s, k1, 0.5 * h);
    EulerRate k2 = euler_rate(g, p, s2.field, s2.ell, s2.rot);
    EulerState s3 = advance(s, k2, 0.5 * h);
    EulerRate k3 = euler_rate(g, p, s3.field, s3.ell, s3.rot);
    EulerState s4 = advance(s, k3, h);
    EulerRate k4 = euler_rate(g, p, s4.field, s4.ell, s4.rot);
    EulerState o = s;
    for (std::size_t p = 0; p < s.field.size(); ++p) {
        o.field.x[p] += h / 6 * (k1.dx[p] + 2 * k2.dx[p] + 2 * k3.dx[p] + k4.dx[p]);
        o.field.alpha[p] += h / 6 * (k1.dalpha[p] + 2 * k2.dalpha[p] + 2 * k3.dalpha[p] + k4.dalpha[p]);
    }
    Vec6 db = h / 6 * (k1.dbody + 2 * k2.dbody + 2 * k3.dbody + k4.dbody);
    o.ell += db.head<3>();
    o.rot += db.tail<3>();
    o.t = s.t + h;
    return o;
}

inline EulerTrajectory run_euler(const EulerGeometry& g, EulerState s, const EulerParams& p) {
    if (!(p.dt > 0)) throw std::invalid_argument("euler: dt must be > 0");
    if (!(p.T >= 0)) throw std::invalid_argument("euler: T must be >= 0");
    EulerTrajectory tr;
    const long n = std::lround(p.T / p.dt);
    auto record = [&](const EulerState& st, const EulerRate& k, double bc) {
        EulerRecord r;
        r.t = st.t;
        r.ell = st.ell;
        r.rot = st.rot;
        r.beta = k.beta;
        r.forcing = k.forcing;
        r.rate = k.dbody;
        r.bc_residual = bc;
        r.particles = st.field.size();
        std::size_t idx = tr.rows.size();
        if (p.energy_every > 0 && (idx % p.energy_every == 0 || st.t >= n * p.dt - 1e-12))
            r.energy = euler_energy(g, p, st.field, st.ell, st.rot);
        tr.rows.push_back(r);
        if (p.keep_snapshots) tr.snapshots.push_back(st.field);
    };
    for (long i = 0; i < n; ++i) {
        EulerRate k1;
        double bc = 0;
        EulerState next = rk4_step(g, p, s, p.dt, k1, bc);
        record(s, k1, bc);
        next.t = (i + 1) * p.dt;
        tr.reflections += reflect_particles(g, next.field);
        if (tr.reflections > p.max_reflections)
            throw EulerFailure("euler: " + std::to_string(tr.reflections) + " particle reflections by t = " + std::to_string(next.t));
        for (const auto& a : next.field.alpha)
            if (!a.allFinite()) throw EulerFailure("euler: non-finite particle strength at t = " + std::to_string(next.t));
        s = std::move(next);
    }
    double bc = 0;
    EulerRate kf = euler_rate(g, p, s.field, s.ell, s.rot, &bc);
    record(s, kf, bc);
    return tr;
}

}  // namespace rigidflow::euler
