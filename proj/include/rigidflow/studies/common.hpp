#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidflow/core/vec.hpp"

namespace rigidflow::studies {

struct SlopeFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_stderr = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double residual_stderr = std::numeric_limits<double>::quiet_NaN();
    std::size_t points = 0;
    bool dropped_coarsest = false;
};

namespace detail {
inline SlopeFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    SlopeFit f;
    const std::size_t n = x.size();
    f.points = n;
    if (n < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ssr = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = y[i] - (f.intercept + f.slope * x[i]);
            ssr += r * r;
        }
        f.residual_stderr = std::sqrt(ssr / (n - 2));
        f.slope_stderr = f.residual_stderr / std::sqrt(sxx);
    } else {
        f.residual_stderr = f.slope_stderr = 0;
    }
    return f;
}
}  // namespace detail

// log y = c + s log p. The first grid point is the coarsest; it is dropped
// (and flagged) when at least three points remain and its residual against
// the fit of the others exceeds 3x that fit's prediction stderr. Measured
// against a fit that includes it, a single residual can never reach 3 sigma
// on fewer than 11 points.
inline SlopeFit fit_loglog(const std::vector<double>& p, const std::vector<double>& y, bool allow_drop = true) {
    if (p.size() != y.size()) throw std::invalid_argument("fit: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0) || !(y[i] > 0) || !std::isfinite(y[i])) return SlopeFit{};
        lx.push_back(std::log(p[i]));
        ly.push_back(std::log(y[i]));
    }
    SlopeFit f = detail::least_squares(lx, ly);
    if (allow_drop && lx.size() >= 4) {
        std::vector<double> rx(lx.begin() + 1, lx.end()), ry(ly.begin() + 1, ly.end());
        SlopeFit g = detail::least_squares(rx, ry);
        double mx = 0, sxx = 0;
        for (double v : rx) mx += v / rx.size();
        for (double v : rx) sxx += (v - mx) * (v - mx);
        double lever = 1.0 + 1.0 / rx.size() + (lx[0] - mx) * (lx[0] - mx) / sxx;
        double r0 = ly[0] - (g.intercept + g.slope * lx[0]);
        // floor at roundoff so exact data never triggers a drop
        double sigma = std::max(g.residual_stderr, 1e-12 * (1 + std::abs(ly[0])));
        if (std::abs(r0) > 3 * sigma * std::sqrt(lever)) {
            g.dropped_coarsest = true;
            return g;
        }
    }
    return f;
}

// exp(mean(log y - s log p)): the prefactor with the slope held at s
inline double pinned_constant(const std::vector<double>& p, const std::vector<double>& y, double s) {
    if (p.empty() || p.size() != y.size()) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0) || !(y[i] > 0)) return std::numeric_limits<double>::quiet_NaN();
        acc += std::log(y[i]) - s * std::log(p[i]);
    }
    return std::exp(acc / p.size());
}

inline bool strictly_decreasing(const std::vector<double>& y) {
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] < y[i - 1])) return false;
    return true;
}

// no consecutive increase beyond the relative tolerance
inline bool decreasing_within(const std::vector<double>& y, double rel) {
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] <= y[i - 1] * (1 + rel))) return false;
    return true;
}

// trapezoid over (possibly non-uniform) samples
inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    if (t.size() != f.size()) throw std::invalid_argument("trapezoid: size mismatch");
    double s = 0;
    for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return s;
}

// Second-order finite differences: central inside, one-sided three-point at
// the ends (uniform spacing assumed, checked).
template <class V>
std::vector<V> fd_derivative(const std::vector<double>& t, const std::vector<V>& y) {
    const std::size_t n = t.size();
    if (n != y.size()) throw std::invalid_argument("fd: size mismatch");
    if (n < 3) throw std::invalid_argument("fd: need at least three samples");
    const double h = t[1] - t[0];
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument("fd: non-uniform sampling");
    std::vector<V> d(n);
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2 * h);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2 * h);
    return d;
}

// index into `fine` for each time of `coarse`; throws when one is missing
inline std::vector<std::size_t> align_times(const std::vector<double>& fine, const std::vector<double>& coarse,
                                            double tol = 1e-9) {
    std::vector<std::size_t> idx;
    std::size_t j = 0;
    for (double t : coarse) {
        while (j < fine.size() && fine[j] < t - tol) ++j;
        if (j == fine.size() || std::abs(fine[j] - t) > tol)
            throw std::invalid_argument("misaligned sampling: no sample at t = " + std::to_string(t));
        idx.push_back(j);
    }
    return idx;
}

// every other sample, always keeping both ends
inline std::vector<std::size_t> halved_indices(std::size_t n) {
    std::vector<std::size_t> k;
    for (std::size_t i = 0; i < n; i += 2) k.push_back(i);
    if (n && k.back() != n - 1) k.push_back(n - 1);
    return k;
}

inline double relative_gap(double a, double b) {
    double s = std::max(std::abs(a), std::abs(b));
    return s > 0 ? std::abs(a - b) / s : 0.0;
}

// Uniform doubles from the raw 64-bit engine output, so sequences agree across
// standard libraries (std distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : e_(seed) {}
    double uniform() { return static_cast<double>(e_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    Vec3d vec3(double a, double b) { return {uniform(a, b), uniform(a, b), uniform(a, b)}; }

private:
    std::mt19937_64 e_;
};

}  // namespace rigidflow::studies
