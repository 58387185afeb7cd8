#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidflow/core/harmonics.hpp"
#include "rigidflow/forms/forms.hpp"
#include "rigidflow/kirchhoff/test_fields.hpp"

namespace rigidflow::viscous {

using forms::FieldH;

// Radial profile in rho = |x|^2:
//   Q = (rho - a^2)^e (Rs^2 - rho)^p rho^k  for rho < Rs^2, else 0.
struct Profile {
    double a2 = 1, Rs2 = 9;
    int e = 0, p = 5, k = 0;

    template <class S>
    void eval(const S& rho, S& Q, S& dQ) const {
        S A = ipow(rho - a2, e), B = ipow(Rs2 - rho, p), C = ipow(rho, k);
        S dA = e > 0 ? ipow(rho - a2, e - 1) * double(e) : S(0.0);
        S dB = ipow(Rs2 - rho, p - 1) * double(-p);
        S dC = k > 0 ? ipow(rho, k - 1) * double(k) : S(0.0);
        Q = A * B * C;
        dQ = dA * B * C + A * dB * C + A * B * dC;
    }
};

struct ModeSpec {
    enum class Type { Toroidal, Poloidal };
    Type type = Type::Toroidal;
    int l = 1, m = 0, k = 0;
    std::string name() const {
        return std::string(type == Type::Toroidal ? "T" : "P") + "(l=" + std::to_string(l) + ",m=" + std::to_string(m) +
               ",k=" + std::to_string(k) + ")";
    }
};

// Toroidal  T = Q grad H ^ x           (tangent to every sphere)
// Poloidal  P = curl T-like field = S grad H - 2 l Q' H x,  S = (l+1) Q + 2 rho Q',
// whose normal component on |x| = a is l(l+1) Q H / a, zero when Q(a^2) = 0.
// Both are exactly divergence free; H is the real solid harmonic of (l,m).
struct ExteriorMode {
    ModeSpec spec;
    Profile prof;
    double scale = 1.0;

    template <class S>
    Vec3<S> operator()(const Vec3<S>& x) const {
        S rho = norm2(x);
        if (rho >= prof.Rs2) return Vec3<S>{S(0.0), S(0.0), S(0.0)};
        using G = Jet<S, 3>;
        Vec3<G> X;
        for (int k = 0; k < 3; ++k) {
            X[k].v = x[k];
            X[k].d[k] = S(1.0);
        }
        std::vector<G> hs;
        solid_harmonics(X, spec.l, hs);
        const G& h = hs[sh_index(spec.l, spec.m)];
        S H = h.v;
        Vec3<S> gH{h.d[0], h.d[1], h.d[2]};
        S Q, dQ;
        prof.eval(rho, Q, dQ);
        if (spec.type == ModeSpec::Type::Toroidal) return cross(gH, x) * (Q * scale);
        S Sf = Q * double(spec.l + 1) + rho * dQ * 2.0;
        return (gH * Sf - x * (dQ * H * double(2 * spec.l))) * scale;
    }
};

inline FieldH mode_field(const ExteriorMode& m) {
    FieldH h = forms::field_from_functor(m, Vec3d::Zero(), Vec3d::Zero(), m.spec.name());
    h.in_V = true;
    h.matched_trace = true;
    h.support = std::sqrt(m.prof.Rs2);
    return h;
}

// Catalogue order: radial index k, then degree l, then toroidal before
// poloidal, then m = -l..l.
inline std::vector<ModeSpec> mode_catalog(int L, int K) {
    std::vector<ModeSpec> c;
    for (int k = 0; k <= K; ++k)
        for (int l = 1; l <= L; ++l)
            for (auto t : {ModeSpec::Type::Toroidal, ModeSpec::Type::Poloidal})
                for (int m = -l; m <= l; ++m) c.push_back({t, l, m, k});
    return c;
}

struct BasisOptions {
    double support_radius = 3.0;  // R_supp, profiles vanish beyond
    int profile_power = 5;        // p
    int max_degree = 4;           // L of the catalogue
    int max_radial = 3;           // K of the catalogue
};

struct GalerkinBasis {
    std::vector<FieldH> modes;  // v_1..v_6 then exterior modes
    std::vector<ExteriorMode> exterior;
    BasisOptions options;
    int N() const { return static_cast<int>(modes.size()); }
};

// Exterior modes are normalised to unit H-norm with the given quadrature;
// v_1..v_6 are kept as they are so that G[0:6] = (l, r).
inline GalerkinBasis build_basis(const kirchhoff::KirchhoffContext& k, int N, const forms::FormsContext& ctx,
                                 BasisOptions opt = {}) {
    if (N < 6) throw std::invalid_argument("build_basis: N must be >= 6");
    if (!k.spec.is_sphere()) throw std::invalid_argument("build_basis: exterior modes need a sphere (general meshes unsupported)");
    const double a = k.spec.radius;
    if (!(opt.support_radius > a)) throw std::invalid_argument("build_basis: support radius must exceed the body radius");
    auto cat = mode_catalog(opt.max_degree, opt.max_radial);
    if (N - 6 > static_cast<int>(cat.size()))
        throw std::invalid_argument("build_basis: N = " + std::to_string(N) + " exceeds the mode catalogue (" +
                                    std::to_string(cat.size() + 6) + ")");
    GalerkinBasis b;
    b.options = opt;
    b.modes = kirchhoff::rigid_test_fields(k);
    for (int j = 0; j < N - 6; ++j) {
        ExteriorMode m;
        m.spec = cat[j];
        m.prof.a2 = a * a;
        m.prof.Rs2 = opt.support_radius * opt.support_radius;
        m.prof.p = opt.profile_power;
        m.prof.k = m.spec.k;
        m.prof.e = m.spec.type == ModeSpec::Type::Poloidal ? 1 : 0;
        double n2 = forms::inner_h(ctx, mode_field(m), mode_field(m));
        m.scale = 1.0 / std::sqrt(n2);
        b.exterior.push_back(m);
        b.modes.push_back(mode_field(m));
    }
    return b;
}

}  // namespace rigidflow::viscous
