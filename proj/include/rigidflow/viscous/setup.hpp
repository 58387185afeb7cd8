#pragma once

#include "rigidflow/viscous/solver.hpp"

namespace rigidflow::viscous {

struct ViscousSetupOptions {
    int N = 30;
    int surface_order = 12;
    int radial_order = 12;
    double truncation = 3.0;   // inner/outer split of the fluid rule
    double cutoff_width = 0.25;
    double chi_R = 50.0;       // truncation radius of the convective form
    BasisOptions basis;
};

// Everything a Galerkin run needs, built once per body.
struct ViscousSetup {
    kirchhoff::KirchhoffContext k;
    forms::FormsContext ctx;
    GalerkinBasis basis;
    GalerkinSystem system;

    std::vector<forms::Sampled> rigid_samples() const {
        return {system.samples.begin(), system.samples.begin() + 6};
    }
};

inline ViscousSetup make_viscous_setup(const geometry::RigidBodySpec& spec, const ViscousSetupOptions& o = {}) {
    ViscousSetup s;
    s.k = kirchhoff::make_kirchhoff(spec);
    s.ctx.quad = geometry::make_quadrature(s.k.spec, o.surface_order, o.radial_order, o.truncation);
    s.ctx.m = s.k.inertia.m;
    s.ctx.J = s.k.inertia.J;
    s.ctx.chi = geometry::CutoffField(s.k.spec, o.cutoff_width);
    s.ctx.chiR = geometry::TruncationField(o.chi_R);
    s.basis = build_basis(s.k, o.N, s.ctx, o.basis);
    s.system = assemble_system(s.basis, s.ctx);
    return s;
}

// Solid density times sigma. The fluid blocks do not see the body density,
// so only the rigid parts change.
inline ViscousSetup scale_inertia(const ViscousSetup& base, double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("scale_inertia: sigma must be > 0");
    ViscousSetup s = base;
    s.k.spec.inertia_scale *= sigma;
    s.k.inertia.m *= sigma;
    s.k.inertia.J *= sigma;
    s.k.M1 *= sigma;
    s.k.M = s.k.M1 + s.k.M2;
    s.ctx.m *= sigma;
    s.ctx.J *= sigma;
    s.system.m *= sigma;
    s.system.J *= sigma;
    return s;
}

// G with rigid part (l, r) and no exterior content: u = l.grad Phi + r.grad Phi
inline VectorXd potential_coefficients(int N, const Vec3d& ell, const Vec3d& rot) {
    VectorXd G = VectorXd::Zero(N);
    G.head<3>() = ell;
    G.segment<3>(3) = rot;
    return G;
}

}  // namespace rigidflow::viscous
