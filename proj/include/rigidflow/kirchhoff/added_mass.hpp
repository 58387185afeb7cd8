#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rigidflow/geometry/body.hpp"
#include "rigidflow/kirchhoff/potentials.hpp"

namespace rigidflow::kirchhoff {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// M2_ij = int_F grad Phi_i . grad Phi_j = - \oint Phi_j K_i ds with the
// body-outward normal (Green's identity; the fluid's outward normal is -n).
inline Mat6 added_mass_boundary(const Potentials& pot, const geometry::SurfaceRule& s) {
    Mat6 M = Mat6::Zero();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (pot.vanishes(i) || pot.vanishes(j)) continue;
            double acc = 0;
            for (std::size_t q = 0; q < s.size(); ++q) acc += s.w[q] * pot.phi(j, s.x[q]) * neumann_data(i, s.x[q], s.n[q]);
            M(i, j) = -acc;
        }
    return M;
}

// BEM path: panel values of Phi_j against exact panel integrals of K_i
inline Mat6 added_mass_bem(const BemPotentials& pot) {
    Mat6 M = Mat6::Zero();
    const auto& c = pot.centroids();
    const auto& n = pot.normals();
    const auto& a = pot.areas();
    for (int j = 0; j < 6; ++j) {
        const Eigen::VectorXd& pj = pot.surface_values(j);
        for (int i = 0; i < 6; ++i) {
            double acc = 0;
            for (std::size_t f = 0; f < c.size(); ++f) acc += a[f] * pj[f] * neumann_data(i, c[f], n[f]);
            M(i, j) = -acc;
        }
    }
    return M;
}

// volume cross-check of the same matrix
inline Mat6 added_mass_volume(const Potentials& pot, const geometry::VolumeRule& v) {
    Mat6 M = Mat6::Zero();
    for (std::size_t q = 0; q < v.size(); ++q) {
        Eigen::Matrix<double, 3, 6> G;
        for (int i = 0; i < 6; ++i) G.col(i) = pot.grad(i, v.x[q]);
        M += v.w[q] * G.transpose() * G;
    }
    return M;
}

struct KirchhoffContext {
    RigidBodySpec spec;
    geometry::Inertia inertia;
    std::shared_ptr<const Potentials> potentials;
    Mat6 M1 = Mat6::Zero(), M2 = Mat6::Zero(), M = Mat6::Zero();
    double asymmetry = 0;  // relative, before symmetrisation

    Vec6 solve(const Vec6& rhs) const { return M.llt().solve(rhs); }
};

struct KirchhoffOptions {
    int surface_order = 24;       // sphere-path boundary rule
    double symmetry_tolerance = 2e-2;
};

inline Mat6 block_inertia(double m, const Mat3& J) {
    Mat6 M1 = Mat6::Zero();
    M1.topLeftCorner<3, 3>() = m * Mat3::Identity();
    M1.bottomRightCorner<3, 3>() = J;
    return M1;
}

inline KirchhoffContext make_kirchhoff(const RigidBodySpec& spec_in, KirchhoffOptions opt = {}) {
    KirchhoffContext k;
    k.spec = geometry::centered(spec_in);
    k.inertia = geometry::compute_inertia(k.spec);
    k.potentials = solve_kirchhoff(k.spec);
    if (auto* bem = dynamic_cast<const BemPotentials*>(k.potentials.get())) {
        k.M2 = added_mass_bem(*bem);
    } else {
        auto dirs = geometry::sphere_directions(opt.surface_order, 2 * opt.surface_order);
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            dirs.x[i] *= k.spec.radius;
            dirs.w[i] *= k.spec.radius * k.spec.radius;
        }
        k.M2 = added_mass_boundary(*k.potentials, dirs);
    }
    double scale = std::max(1e-300, k.M2.cwiseAbs().maxCoeff());
    k.asymmetry = (k.M2 - k.M2.transpose()).cwiseAbs().maxCoeff() / scale;
    if (k.asymmetry > opt.symmetry_tolerance)
        throw std::runtime_error("added mass: M2 asymmetry " + std::to_string(k.asymmetry) + " exceeds tolerance");
    k.M2 = 0.5 * (k.M2 + k.M2.transpose()).eval();
    k.M1 = block_inertia(k.inertia.m, k.inertia.J);
    k.M = k.M1 + k.M2;
    if (k.M.llt().info() != Eigen::Success) throw std::runtime_error("added mass: M is not positive definite");
    return k;
}

// -------------------------------------------------------------------------
// Bound ||M^-1 [F;T]|| <= 2 (||F||/m + ||J^-1|| ||T||)

struct InverseBound {
    double lhs = 0, rhs = 0;
    bool holds = false;
};

inline double inverse_spectral_norm(const Mat3& J) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(J);
    return 1.0 / es.eigenvalues().minCoeff();
}

inline InverseBound inverse_bound_check(const Mat6& M, double m, const Mat3& J, const Vec3d& F, const Vec3d& T) {
    Eigen::LDLT<Mat6> ldlt(M);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-15) throw std::runtime_error("inverse bound: singular M");
    Vec6 b;
    b << F, T;
    InverseBound r;
    r.lhs = ldlt.solve(b).norm();
    r.rhs = 2.0 * (F.norm() / m + inverse_spectral_norm(J) * T.norm());
    r.holds = r.lhs <= r.rhs;
    return r;
}

struct ThresholdSearch {
    double threshold = 0;  // smallest grid value t with m_ = beta = t passing
    bool found = false;
    int samples = 0;
    std::vector<double> grid;
};

// Grid search for the (m_, beta) of the bound, with m_ = beta as in the text.
// The body shape (and so M2) is fixed; the mass is m and J = lambda J_hat with
// J_hat the unit-trace-normalised shape of the body's own tensor.
inline ThresholdSearch search_threshold(const Mat6& M2, const Mat3& J_shape, std::vector<double> grid,
                                        int samples = 200, unsigned seed = 7) {
    ThresholdSearch out;
    out.grid = grid;
    out.samples = samples;
    Eigen::SelfAdjointEigenSolver<Mat3> es(J_shape);
    Mat3 Jhat = J_shape / es.eigenvalues().minCoeff();  // min eigenvalue 1
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vec6> ft(samples);
    for (auto& v : ft)
        for (int k = 0; k < 6; ++k) v[k] = g(rng);
    for (double t : grid) {
        bool ok = true;
        for (double m : {t, 2 * t, 8 * t, 64 * t}) {
            for (double lam : {t, 2 * t, 8 * t, 64 * t}) {
                Mat3 J = lam * Jhat;
                Mat6 M = block_inertia(m, J) + M2;
                for (const auto& v : ft) {
                    if (!inverse_bound_check(M, m, J, v.head<3>(), v.tail<3>()).holds) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (!ok) break;
        }
        if (ok) {
            out.threshold = t;
            out.found = true;
            return out;
        }
    }
    return out;
}

}  // namespace rigidflow::kirchhoff
