#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "rigidflow/core/vec.hpp"

namespace rigidflow {

inline int sh_index(int l, int m) { return l * l + l + m; }
inline int sh_count(int L) { return (L + 1) * (L + 1); }

// Real solid harmonics r^l Y_lm(x/|x|), orthonormal on the unit sphere.
// m > 0 is the cosine family, m < 0 the sine family. Homogeneous harmonic
// polynomials, so any scalar type that supports + - * works.
template <class S>
void solid_harmonics(const Vec3<S>& x, int L, std::vector<S>& out) {
    out.assign(sh_count(L), S(0.0));
    const S r2 = norm2(x);
    const S& z = x[2];
    S cr(1.0), ci(0.0);
    double cmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
    for (int m = 0; m <= L; ++m) {
        if (m > 0) {
            S ncr = cr * x[0] - ci * x[1];
            S nci = cr * x[1] + ci * x[0];
            cr = ncr;
            ci = nci;
            cmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
        }
        S qm2(0.0), qm1(cmm);
        double a_prev = 0.0;
        for (int l = m; l <= L; ++l) {
            S q;
            double a = 0.0;
            if (l == m) {
                q = qm1;
            } else {
                a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
                if (l == m + 1)
                    q = z * qm1 * a;
                else
                    q = (z * qm1 - r2 * qm2 / a_prev) * a;
                qm2 = qm1;
                qm1 = q;
            }
            a_prev = a;
            if (m == 0) {
                out[sh_index(l, 0)] = q;
            } else {
                out[sh_index(l, m)] = q * cr * std::numbers::sqrt2;
                out[sh_index(l, -m)] = q * ci * std::numbers::sqrt2;
            }
        }
    }
}

}  // namespace rigidflow
