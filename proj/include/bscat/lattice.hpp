#pragma once

// Singular corrections for the trapezoidal rule on a cubic lattice.
//
// For a smooth F and a point c at lattice offset delta (in units of h),
//   h^3 sum_j F(x_j) / |x_j - c|^p = int F(y) / |y - c|^p dy - C_p(delta) h^{3-p} F(c) + O(h^{5-p}),
// where the sum skips a node that coincides with c. The constant C_p(delta)
// is measured on Gaussians F = exp(-|y - c|^2 / s^2), whose integral is known
// in closed form, and extrapolated in 1/s^2 to remove the curvature terms.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "bscat/core.hpp"

namespace bscat {

namespace detail {

inline double gaussian_lattice_defect(int p, const Vec3& delta, double s) {
    const double exact = 2.0 * pi * std::pow(s, 3.0 - p) * std::tgamma(0.5 * (3.0 - p));
    const int n = static_cast<int>(std::ceil(6.5 * s)) + 2;
    const double inv_s2 = 1.0 / (s * s);
    const double cut2 = (6.5 * s) * (6.5 * s);
    double sum = 0.0;
    for (int i = -n; i <= n; ++i) {
        const double dx = i - delta.x;
        for (int j = -n; j <= n; ++j) {
            const double dy = j - delta.y;
            const double dxy = dx * dx + dy * dy;
            if (dxy > cut2) continue;
            double row = 0.0;
            for (int k = -n; k <= n; ++k) {
                const double dz = k - delta.z;
                const double r2 = dxy + dz * dz;
                if (r2 < 1e-24 || r2 > cut2) continue;
                const double g = std::exp(-r2 * inv_s2);
                row += p == 1 ? g / std::sqrt(r2) : g / std::pow(r2, 0.5 * p);
            }
            sum += row;
        }
    }
    return exact - sum;
}

}  // namespace detail

/// Reduce a displacement (in units of h) to the offset from its nearest
/// lattice node, each component in [-1/2, 1/2].
inline Vec3 lattice_offset(const Vec3& v) {
    return {v.x - std::round(v.x), v.y - std::round(v.y), v.z - std::round(v.z)};
}

/// C_p(delta) for p in {1, 2}. `levels` >= 1 Gaussian widths are combined by
/// polynomial extrapolation in 1/s^2 (Neville). Results are cached.
inline double lattice_singular_constant(int p, const Vec3& delta, int levels = 3) {
    if (p != 1 && p != 2) throw ParameterError("lattice correction only for 1/r and 1/r^2 singularities");
    if (levels < 1) throw ParameterError("calibration needs at least one level");
    // The defect is symmetric under sign flips and permutations of delta.
    std::array<double, 3> d = {std::abs(delta.x), std::abs(delta.y), std::abs(delta.z)};
    std::sort(d.begin(), d.end());
    for (auto& c : d) c = std::round(c * 1e12) / 1e12;
    const Vec3 key_delta{d[0], d[1], d[2]};

    using Key = std::tuple<int, int, double, double, double>;
    static std::mutex mu;
    static std::map<Key, double> cache;
    const Key key{p, levels, key_delta.x, key_delta.y, key_delta.z};
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    std::vector<double> xs, ys;
    double s = 3.0;
    for (int l = 0; l < levels; ++l) {
        xs.push_back(1.0 / (s * s));
        ys.push_back(detail::gaussian_lattice_defect(p, key_delta, s));
        s *= 1.6;
    }
    // Neville's scheme evaluated at x = 0
    for (int m = 1; m < levels; ++m)
        for (int i = 0; i + m < levels; ++i)
            ys[i] = (xs[i + m] * ys[i] - xs[i] * ys[i + 1]) / (xs[i + m] - xs[i]);
    const double value = ys[0];

    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, value);
    return value;
}

}  // namespace bscat
