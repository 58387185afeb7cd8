#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rigidflow/viscous/basis.hpp"

namespace rigidflow::viscous {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using kirchhoff::Mat6;
using kirchhoff::Vec6;

// Dense Galerkin operators. Fluid and rigid contributions are stored apart so
// the inertia (m, J) can be rescaled without touching the quadrature.
struct GalerkinSystem {
    int N = 0;
    MatrixXd M_fluid;   // int_F w_i . w_j
    MatrixXd A_strain;  // int_F D(w_i):D(w_j)
    MatrixXd A_slip;    // \oint (w_i - w_iS).(w_j - w_jS)
    std::vector<MatrixXd> B_fluid;  // B_fluid[j](i,k) = fluid part of b_R(w_i, w_k, w_j)
    std::vector<Vec3d> ell, rot;    // rigid parts of each mode
    double m = 1;
    Mat3 J = Mat3::Identity();
    std::vector<forms::Sampled> samples;  // modes on the assembly quadrature
    double antisymmetry_defect = 0;       // max |B(i,k,j)+B(i,j,k)| / max|B| before projection

    MatrixXd mass() const {
        MatrixXd M = M_fluid;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) M(i, j) += m * ell[i].dot(ell[j]) + (J * rot[i]).dot(rot[j]);
        return M;
    }
    MatrixXd stiffness(double alpha) const { return -alpha * A_slip - A_strain; }

    // b_R(w_i, w_k, w_j) including the rigid terms
    double b(int i, int k, int j) const {
        return B_fluid[j](i, k) - m * det3(rot[i], ell[k], ell[j]) + det3(J * rot[i], rot[k], rot[j]);
    }

    // B(G,G)_j = sum_{i,k} G_i G_k b_R(w_i, w_k, w_j)
    VectorXd trilinear(const VectorXd& G) const {
        VectorXd out(N);
        Vec3d l = Vec3d::Zero(), r = Vec3d::Zero();
        for (int i = 0; i < N; ++i) {
            l += G[i] * ell[i];
            r += G[i] * rot[i];
        }
        for (int j = 0; j < N; ++j) {
            out[j] = G.dot(B_fluid[j] * G) - m * det3(r, l, ell[j]) + det3(J * r, r, rot[j]);
        }
        return out;
    }

    GalerkinSystem restricted(int first) const {
        GalerkinSystem s;
        s.N = N - first;
        s.M_fluid = M_fluid.bottomRightCorner(s.N, s.N);
        s.A_strain = A_strain.bottomRightCorner(s.N, s.N);
        s.A_slip = A_slip.bottomRightCorner(s.N, s.N);
        for (int j = first; j < N; ++j) s.B_fluid.push_back(B_fluid[j].bottomRightCorner(s.N, s.N));
        s.ell.assign(ell.begin() + first, ell.end());
        s.rot.assign(rot.begin() + first, rot.end());
        s.m = m;
        s.J = J;
        s.samples.assign(samples.begin() + first, samples.end());
        return s;
    }
};

inline GalerkinSystem assemble_system(const GalerkinBasis& basis, const forms::FormsContext& ctx) {
    const int N = basis.N();
    const auto& Q = ctx.quad;
    const std::size_t nq = Q.fluid.size(), ns = Q.surface.size();
    GalerkinSystem S;
    S.N = N;
    S.m = ctx.m;
    S.J = ctx.J;
    S.samples.resize(N);
    for (int i = 0; i < N; ++i) {
        S.samples[i] = forms::sample(basis.modes[i], Q);
        S.ell.push_back(basis.modes[i].ell);
        S.rot.push_back(basis.modes[i].rot);
        for (const auto& s : S.samples[i].vol)
            if (!s.u.allFinite() || !s.grad.allFinite())
                throw std::runtime_error("assemble_system: non-finite sample in mode " + std::to_string(i + 1));
    }

    // value matrix V (3nq x N), weighted value matrix, strain matrix E (9nq x N)
    MatrixXd V(3 * nq, N), Vw(3 * nq, N), E(9 * nq, N);
    for (int i = 0; i < N; ++i)
        for (std::size_t q = 0; q < nq; ++q) {
            const auto& s = S.samples[i].vol[q];
            double w = Q.fluid.w[q];
            Mat3 D = forms::sym(s.grad);
            for (int c = 0; c < 3; ++c) {
                V(3 * q + c, i) = s.u[c];
                Vw(3 * q + c, i) = w * s.u[c];
            }
            for (int c = 0; c < 9; ++c) E(9 * q + c, i) = std::sqrt(w) * D(c % 3, c / 3);
        }
    S.M_fluid = Vw.transpose() * V;
    S.A_strain = E.transpose() * E;
    MatrixXd Sl(3 * ns, N);
    for (int i = 0; i < N; ++i)
        for (std::size_t q = 0; q < ns; ++q) {
            Vec3d slip = S.samples[i].surf[q].u - (S.ell[i] + S.rot[i].cross(Q.surface.x[q]));
            for (int c = 0; c < 3; ++c) Sl(3 * q + c, i) = std::sqrt(Q.surface.w[q]) * slip[c];
        }
    S.A_slip = Sl.transpose() * Sl;
    S.M_fluid = 0.5 * (S.M_fluid + S.M_fluid.transpose()).eval();

    // fluid part of b_R: sum_q w [grad w_j (w_i - u_iS^R)] . w_k - det(r_i, w_k, w_j)
    S.B_fluid.assign(N, MatrixXd::Zero(N, N));
    std::vector<Vec3d> arm(nq);
    for (std::size_t q = 0; q < nq; ++q) arm[q] = ctx.chiR(Q.fluid.x[q]);
    // C(k,j) = sum_q w (w_k ^ w_j), contracted with r_i below
    std::vector<MatrixXd> C(3, MatrixXd::Zero(N, N));
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j) {
            Vec3d acc = Vec3d::Zero();
            for (std::size_t q = 0; q < nq; ++q)
                acc += Q.fluid.w[q] * S.samples[k].vol[q].u.cross(S.samples[j].vol[q].u);
            for (int c = 0; c < 3; ++c) C[c](k, j) = acc[c];
        }
    MatrixXd Gi(3 * nq, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j)
            for (std::size_t q = 0; q < nq; ++q) {
                const auto& si = S.samples[i].vol[q];
                Vec3d rel = si.u - (S.ell[i] + S.rot[i].cross(arm[q]));
                Vec3d g = Q.fluid.w[q] * (S.samples[j].vol[q].grad * rel);
                for (int c = 0; c < 3; ++c) Gi(3 * q + c, j) = g[c];
            }
        MatrixXd Bi = Gi.transpose() * V;  // (j, k)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                double det = S.rot[i][0] * C[0](k, j) + S.rot[i][1] * C[1](k, j) + S.rot[i][2] * C[2](k, j);
                S.B_fluid[j](i, k) = Bi(j, k) - det;
            }
    }
    // b_R(u,v,v) = 0 holds only up to quadrature error; keep the measured
    // defect and project onto the antisymmetric part so the discrete energy
    // balance carries no spurious source.
    double bmax = 0, defect = 0;
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k) {
                bmax = std::max(bmax, std::abs(S.B_fluid[j](i, k)));
                defect = std::max(defect, std::abs(S.B_fluid[j](i, k) + S.B_fluid[k](i, j)));
            }
    S.antisymmetry_defect = bmax > 0 ? defect / bmax : 0.0;
    {
        auto B = S.B_fluid;
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i)
                for (int k = 0; k < N; ++k) S.B_fluid[j](i, k) = 0.5 * (B[j](i, k) - B[k](i, j));
    }
    for (int j = 0; j < N; ++j)
        if (!S.B_fluid[j].allFinite()) throw std::runtime_error("assemble_system: non-finite trilinear entry, slot " + std::to_string(j + 1));
    return S;
}

}  // namespace rigidflow::viscous
