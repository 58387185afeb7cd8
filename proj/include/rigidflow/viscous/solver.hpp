#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidflow/kirchhoff/added_mass.hpp"
#include "rigidflow/viscous/system.hpp"

namespace rigidflow::viscous {

struct ViscousParams {
    double nu = 1e-2;
    double alpha = 1.0;
    double T = 1.0;
    double dt = 1e-2;
    double slack_tolerance = 1e-8;  // relative to ||u0||_H^2
    int max_halvings = 20;
};

// One row per accepted step; the dissipation columns are cumulative.
struct LedgerRow {
    double t = 0, dt = 0;
    double energy = 0;       // 1/2 ||u||_H^2
    double strain_diss = 0;  // 2 nu int_0^t int_F |D(u)|^2
    double slip_diss = 0;    // 2 alpha nu int_0^t \oint |u - u_S|^2
    double slack = 0;        // 1/2||u0||^2 - energy - dissipation
};

struct ViscousTrajectory {
    std::vector<double> t;
    std::vector<VectorXd> G;
    std::vector<LedgerRow> ledger;
    double norm0_sq = 0;  // ||u_N0||_H^2
    int halvings = 0;
    int rejected = 0;

    double min_slack() const {
        double s = 0;
        for (const auto& r : ledger) s = std::min(s, r.slack);
        return s;
    }
};

class ViscousFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// u_N = sum G_j w_j on the assembly nodes
inline forms::Sampled reconstruct(const GalerkinSystem& S, const VectorXd& G) {
    forms::Sampled u;
    if (S.N == 0) return u;
    u.vol.resize(S.samples[0].vol.size());
    u.surf.resize(S.samples[0].surf.size());
    for (int j = 0; j < S.N; ++j) {
        if (G[j] == 0.0) continue;
        const auto& w = S.samples[j];
        for (std::size_t q = 0; q < u.vol.size(); ++q) {
            u.vol[q].u += G[j] * w.vol[q].u;
            u.vol[q].grad += G[j] * w.vol[q].grad;
        }
        for (std::size_t q = 0; q < u.surf.size(); ++q) {
            u.surf[q].u += G[j] * w.surf[q].u;
            u.surf[q].grad += G[j] * w.surf[q].grad;
        }
        u.ell += G[j] * S.ell[j];
        u.rot += G[j] * S.rot[j];
    }
    return u;
}

// Orthogonal projection in H: M_N G = [(u0, w_j)_H]
inline VectorXd project(const GalerkinSystem& S, const forms::FormsContext& ctx, const forms::FieldH& u0) {
    forms::FormsContext c = ctx;
    c.m = S.m;
    c.J = S.J;
    forms::Sampled s = forms::sample(u0, ctx.quad);
    VectorXd rhs(S.N);
    for (int j = 0; j < S.N; ++j) rhs[j] = forms::inner_h(c, s, S.samples[j]);
    return S.mass().ldlt().solve(rhs);
}

class ViscousStepper {
public:
    ViscousStepper(const GalerkinSystem& S, double nu, double alpha) : S_(S), nu_(nu), alpha_(alpha) {
        M_ = S.mass();
        llt_.compute(M_);
        if (llt_.info() != Eigen::Success) throw ViscousFailure("viscous: Gram matrix is not positive definite");
        A_ = S.stiffness(alpha);
    }

    const MatrixXd& mass() const { return M_; }

    // G' = M^-1 (2 nu A G + B(G,G))
    VectorXd rate(const VectorXd& G) const { return llt_.solve(2 * nu_ * (A_ * G) + S_.trilinear(G)); }
    VectorXd forcing(const VectorXd& G) const { return 2 * nu_ * (A_ * G) + S_.trilinear(G); }

    double energy(const VectorXd& G) const { return 0.5 * G.dot(M_ * G); }
    double strain_power(const VectorXd& G) const { return 2 * nu_ * G.dot(S_.A_strain * G); }
    double slip_power(const VectorXd& G) const { return 2 * nu_ * alpha_ * G.dot(S_.A_slip * G); }

    // RK4 on (G, strain dissipation, slip dissipation)
    void step(VectorXd& G, double& ds, double& dl, double dt) const {
        auto f = [&](const VectorXd& g, double& ps, double& pl) {
            ps = strain_power(g);
            pl = slip_power(g);
            return rate(g);
        };
        double s1, l1, s2, l2, s3, l3, s4, l4;
        VectorXd k1 = f(G, s1, l1);
        VectorXd k2 = f(G + 0.5 * dt * k1, s2, l2);
        VectorXd k3 = f(G + 0.5 * dt * k2, s3, l3);
        VectorXd k4 = f(G + dt * k3, s4, l4);
        G += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        ds += dt / 6 * (s1 + 2 * s2 + 2 * s3 + s4);
        dl += dt / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
    }

private:
    const GalerkinSystem& S_;
    double nu_, alpha_;
    MatrixXd M_, A_;
    Eigen::LLT<MatrixXd> llt_;
};

// Fixed steps of size dt; a step whose ledger slack drops below the tolerance
// is retried with dt/2, and the halved step is kept for the rest of the run.
inline ViscousTrajectory integrate(const GalerkinSystem& S, const VectorXd& G0, const ViscousParams& p) {
    if (!(p.dt > 0)) throw std::invalid_argument("viscous: dt must be > 0");
    if (!(p.T >= 0)) throw std::invalid_argument("viscous: T must be >= 0");
    if (!(p.nu > 0)) throw std::invalid_argument("viscous: nu must be > 0");
    if (G0.size() != S.N) throw std::invalid_argument("viscous: initial coefficients have the wrong size");
    ViscousStepper st(S, p.nu, p.alpha);
    ViscousTrajectory tr;
    VectorXd G = G0;
    double E0 = st.energy(G);
    tr.norm0_sq = 2 * E0;
    double tol = p.slack_tolerance * tr.norm0_sq;
    double ds = 0, dl = 0, t = 0, dt = p.dt;
    tr.t.push_back(0);
    tr.G.push_back(G);
    tr.ledger.push_back({0, 0, E0, 0, 0, 0});
    const long nsteps_nominal = std::lround(p.T / p.dt);
    long done_units = 0;  // progress in units of the current dt
    double t_end = nsteps_nominal * p.dt;
    while (t < t_end - 1e-12 * p.dt) {
        VectorXd Gn = G;
        double dsn = ds, dln = dl;
        double h = std::min(dt, t_end - t);
        st.step(Gn, dsn, dln, h);
        if (!Gn.allFinite()) throw ViscousFailure("viscous: non-finite coefficients at t = " + std::to_string(t));
        double E = st.energy(Gn);
        double slack = E0 - E - dsn - dln;
        if (slack < -tol) {
            ++tr.rejected;
            if (tr.halvings >= p.max_halvings) {
                tr.ledger.push_back({t + h, h, E, dsn, dln, slack});
                return tr;  // caller inspects min_slack
            }
            ++tr.halvings;
            dt *= 0.5;
            continue;
        }
        G = Gn;
        ds = dsn;
        dl = dln;
        // snap to the nominal grid so repeated runs land on identical times
        ++done_units;
        t = (dt == p.dt) ? done_units * p.dt : t + h;
        tr.t.push_back(t);
        tr.G.push_back(G);
        tr.ledger.push_back({t, h, E, ds, dl, slack});
    }
    return tr;
}

// -------------------------------------------------------------------------
// Body acceleration from the added-mass equation
//   M [l; r]' = (2 nu a(u, v_i) + b(u, u, v_i))_i
// with b(u,u,v_i) expanded as the rigid block plus the volume integral.

struct BodyForces {
    Vec6 viscous = Vec6::Zero();   // 2 nu a(u, v_i)
    Vec6 inertial = Vec6::Zero();  // b(u, u, v_i)
    Vec6 rate = Vec6::Zero();      // M^-1 (viscous + inertial)
};

inline BodyForces body_rate_from_added_mass(const forms::Sampled& u, const forms::FormsContext& ctx,
                                            const kirchhoff::KirchhoffContext& k,
                                            const std::vector<forms::Sampled>& v) {
    if (v.size() != 6) throw std::invalid_argument("body rate: need the six rigid test fields");
    BodyForces f;
    const auto& Q = ctx.quad;
    Vec3d l = u.ell, r = u.rot;
    const double m = k.M1(0, 0);
    const Mat3 J = k.M1.bottomRightCorner<3, 3>();
    Vec3d lin = m * l.cross(r);
    Vec3d ang = (J * r).cross(r);
    for (int i = 0; i < 6; ++i) {
        f.viscous[i] = 2 * ctx.nu * forms::eval_a(ctx, u, v[i]);
        double vol = chunked_sum<double>(Q.fluid.size(), [&](std::size_t q) {
            const auto& s = u.vol[q];
            Vec3d rel = s.u - (l + r.cross(Q.fluid.x[q]));
            return Q.fluid.w[q] * ((v[i].vol[q].grad * rel).dot(s.u) - det3(r, s.u, v[i].vol[q].u));
        }, 0.0);
        f.inertial[i] = (i < 3 ? lin[i] : ang[i - 3]) + vol;
    }
    Eigen::FullPivLU<Mat6> lu(k.M);
    if (!lu.isInvertible()) throw std::runtime_error("body rate: added-mass matrix is singular");
    f.rate = lu.solve(f.viscous + f.inertial);
    return f;
}

}  // namespace rigidflow::viscous
