#pragma once

#include <vector>

#include "rigidflow/forms/field.hpp"
#include "rigidflow/kirchhoff/added_mass.hpp"

namespace rigidflow::kirchhoff {

// v_i = grad Phi_i in the fluid, e_i (i<3) or e_{i-3} ^ x in the body.
inline forms::FieldH rigid_test_field(const KirchhoffContext& k, int i) {
    forms::FieldH h;
    auto pot = k.potentials;
    if (!pot->vanishes(i)) {
        h.fluid = [pot, i](const Vec3d& x) { return forms::Sample{pot->grad(i, x), pot->hess(i, x)}; };
    } else {
        h.fluid = [](const Vec3d&) { return forms::Sample{}; };
        h.support = 0;
    }
    h.laplacian = [](const Vec3d&) { return Vec3d::Zero().eval(); };  // harmonic potential
    if (i < 3)
        h.ell = Vec3d::Unit(i);
    else
        h.rot = Vec3d::Unit(i - 3);
    h.in_V = true;
    h.matched_trace = true;
    h.label = "v" + std::to_string(i + 1);
    return h;
}

inline std::vector<forms::FieldH> rigid_test_fields(const KirchhoffContext& k) {
    std::vector<forms::FieldH> v;
    for (int i = 0; i < 6; ++i) v.push_back(rigid_test_field(k, i));
    return v;
}

// u = sum beta_i v_i with beta = [l; r]: the fluid response to rigid motion
inline forms::FieldH potential_flow(const KirchhoffContext& k, const Vec3d& ell, const Vec3d& rot) {
    auto v = rigid_test_fields(k);
    std::vector<double> c{ell[0], ell[1], ell[2], rot[0], rot[1], rot[2]};
    forms::FieldH h = forms::combine(v, c);
    h.label = "potential-flow";
    return h;
}

}  // namespace rigidflow::kirchhoff
