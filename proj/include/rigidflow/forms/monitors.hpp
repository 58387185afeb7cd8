#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rigidflow/forms/forms.hpp"

namespace rigidflow::forms {

struct MonitorRow {
    std::string name;
    double param = 0;  // gamma for the trace bound, 0 otherwise
    double lhs = 0, rhs = 0;
    bool holds = false;
};

struct MonitorReport {
    std::vector<MonitorRow> rows;
    double trace_constant = 0;  // smallest C making every trace row hold
    int violations() const {
        int v = 0;
        for (const auto& r : rows) v += !r.holds;
        return v;
    }
};

// ||v||_L4 <= sqrt(2) ||v||_L2^(1/4) ||grad v||_L2^(3/4)
inline MonitorRow interpolation_row(const FormsContext& c, const Sampled& u) {
    MonitorRow r;
    r.name = "interpolation";
    r.lhs = l4_fluid(c, u);
    r.rhs = std::numbers::sqrt2 * std::pow(l2_fluid(c, u), 0.25) * std::pow(grad_l2(c, u), 0.75);
    r.holds = r.lhs <= r.rhs;
    return r;
}

// C(J) = (lmax - lmin) / (2 lmin): ||(J r) ^ r|| <= |J - mu I| |r|^2 with
// mu the mid-spectrum, and |r|^2 <= (J r).r / lmin.
inline double wedge_constant(const Mat3& J) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(J);
    auto ev = es.eigenvalues();
    return (ev.maxCoeff() - ev.minCoeff()) / (2 * ev.minCoeff());
}

inline MonitorRow wedge_row(const Mat3& J, const Vec3d& r) {
    MonitorRow row;
    row.name = "wedge";
    Vec3d Jr = J * r;
    row.lhs = Jr.cross(r).norm();
    row.rhs = wedge_constant(J) * Jr.dot(r);
    // roundoff in the cross product of nearly parallel vectors
    double slack = 1e-13 * J.norm() * r.squaredNorm();
    row.holds = row.lhs <= row.rhs + slack;
    return row;
}

// Trace bound for fields tangent to the boundary:
//   ||f||_{L2(dS)} <= C g^(1/3) ||f||^(2/3) + ||D f||^2 / (4 g) + C ||f||.
// The constant is not given, so we report the smallest C that works for
// each gamma; rows hold by construction once C is fitted.
inline void trace_rows(const FormsContext& c, const Sampled& f, const std::vector<double>& gammas, MonitorReport& rep) {
    double tr = trace_l2(c, f), l2 = l2_fluid(c, f), d = strain_l2(c, f);
    for (double g : gammas) {
        double need = (tr - d * d / (4 * g)) / (std::cbrt(g) * std::pow(l2, 2.0 / 3.0) + l2);
        rep.trace_constant = std::max(rep.trace_constant, need);
    }
    for (double g : gammas) {
        MonitorRow r;
        r.name = "trace";
        r.param = g;
        r.lhs = tr;
        r.rhs = rep.trace_constant * (std::cbrt(g) * std::pow(l2, 2.0 / 3.0) + l2) + d * d / (4 * g);
        r.holds = r.lhs <= r.rhs * (1 + 1e-12);
        rep.rows.push_back(r);
    }
}

inline MonitorReport inequality_monitors(const FormsContext& c, const FieldH& u, const std::vector<double>& gammas = {0.1, 1, 10}) {
    MonitorReport rep;
    Sampled s = sample(u, c.quad);
    rep.rows.push_back(interpolation_row(c, s));
    if (u.rot.norm() > 0) rep.rows.push_back(wedge_row(c.J, u.rot));
    if (u.ell.norm() == 0 && u.rot.norm() == 0) trace_rows(c, s, gammas, rep);
    return rep;
}

}  // namespace rigidflow::forms
