#pragma once

// One-dimensional adaptive quadrature for smooth (possibly oscillatory,
// complex-valued) integrands on finite intervals.

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bscat/core.hpp"

namespace bscat::quad {

inline constexpr unsigned default_depth = 12;

namespace detail {

template <class F>
auto bisect(F& f, double a, double b, double abs_tol, unsigned depth) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0;
    auto est = GK::integrate(f, a, b, 0, 0.0, &err);
    if (depth == 0 || err <= abs_tol) return est;
    const double mid = 0.5 * (a + b);
    return bisect(f, a, mid, 0.5 * abs_tol, depth - 1) + bisect(f, mid, b, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod with the error target rel_tol * int |f| rather than
/// rel_tol * |int f|, so cancelling (oscillatory) pieces do not force
/// bisection down to roundoff.
template <class F>
auto integrate(F&& f, double a, double b, double rel_tol = 1e-11, unsigned depth = default_depth) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0, L1 = 0.0;
    auto est = GK::integrate(f, a, b, 0, 0.0, &err, &L1);
    const double abs_tol = rel_tol * L1;
    if (depth == 0 || err <= abs_tol) return est;
    const double mid = 0.5 * (a + b);
    return detail::bisect(f, a, mid, 0.5 * abs_tol, depth - 1) + detail::bisect(f, mid, b, 0.5 * abs_tol, depth - 1);
}

/// Integral over [a, b] split into pieces no longer than `piece`; keeps the
/// adaptive bisection from missing structure on long intervals.
template <class F>
auto integrate_pieces(F&& f, double a, double b, double piece, double rel_tol = 1e-11) {
    using R = decltype(f(a));
    R acc{};
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / piece)));
    const double step = (b - a) / n;
    for (int k = 0; k < n; ++k) {
        const double lo = a + k * step;
        const double hi = (k + 1 == n) ? b : lo + step;
        acc += integrate(f, lo, hi, rel_tol);
    }
    return acc;
}

}  // namespace bscat::quad
