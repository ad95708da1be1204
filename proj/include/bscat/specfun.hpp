#pragma once

// Complex Gamma and the Kummer function M(a, 1, i*lambda) in the regime used
// by Coulomb waves (a = iZ/(2 sigma), lambda real).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bscat/core.hpp"
#include "bscat/quadrature.hpp"

namespace bscat {

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficient set, also used
// by Numerical Recipes 3rd ed. and most small gamma implementations).
namespace detail {
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_p = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline cplx gamma_lanczos(cplx z) {
    z -= 1.0;
    cplx x = lanczos_p[0];
    for (std::size_t i = 1; i < lanczos_p.size(); ++i) x += lanczos_p[i] / (z + static_cast<double>(i));
    const cplx t = z + lanczos_g + 0.5;
    return std::sqrt(2.0 * pi) * std::exp((z + 0.5) * std::log(t) - t) * x;
}
}  // namespace detail

inline cplx gamma_complex(cplx z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw PoleError("gamma evaluated at a nonpositive integer");
    if (z.real() < 0.5) return pi / (std::sin(pi * z) * detail::gamma_lanczos(1.0 - z));
    return detail::gamma_lanczos(z);
}

/// 1 / (Gamma(1-a) Gamma(1+a)) = sin(pi a)/(pi a), with the removable point a = 0.
inline cplx inv_gamma_pair(cplx a) {
    if (std::abs(a) < 1e-8) return 1.0 - pi * pi * a * a / 6.0;
    return std::sin(pi * a) / (pi * a);
}

// ---------------------------------------------------------------------------
// Maclaurin series. Templated on the real type so test oracles can run it
// in extended precision; arithmetic is spelled out on (re, im) pairs.

template <class R>
struct KummerSeriesResult {
    R m_re, m_im;    // M(a, 1, z)
    R dz_re, dz_im;  // dM/dz
};

template <class R>
KummerSeriesResult<R> kummer_series(const R& a_re, const R& a_im, const R& z_re, const R& z_im,
                                    int max_terms = 100000) {
    using std::abs;
    const R eps = std::numeric_limits<R>::epsilon();
    R t_re = 1, t_im = 0;  // (a)_k z^k / (k!)^2
    R s_re = 1, s_im = 0;
    R d_re = 0, d_im = 0;
    const R zabs = sqrt(z_re * z_re + z_im * z_im);
    for (int k = 0; k < max_terms; ++k) {
        // term_{k+1} = term_k * (a + k) * z / (k+1)^2
        const R p_re = a_re + k, p_im = a_im;
        const R q_re = p_re * z_re - p_im * z_im;
        const R q_im = p_re * z_im + p_im * z_re;
        const R n_re = t_re * q_re - t_im * q_im;
        const R n_im = t_re * q_im + t_im * q_re;
        const R kk = R(k + 1) * R(k + 1);
        t_re = n_re / kk;
        t_im = n_im / kk;
        s_re += t_re;
        s_im += t_im;
        // d/dz of term_{k+1} is (k+1) term_{k+1} / z; accumulate as term*(k+1) and divide at the end
        d_re += t_re * R(k + 1);
        d_im += t_im * R(k + 1);
        const R tabs = abs(t_re) + abs(t_im);
        const R sabs = abs(s_re) + abs(s_im);
        if (R(k) > zabs && tabs * R(k + 2) <= eps * sabs) break;
    }
    KummerSeriesResult<R> out{s_re, s_im, 0, 0};
    const R zz = z_re * z_re + z_im * z_im;
    if (zz == 0) {
        // dM/dz at 0 is a
        out.dz_re = a_re;
        out.dz_im = a_im;
    } else {
        out.dz_re = (d_re * z_re + d_im * z_im) / zz;
        out.dz_im = (d_im * z_re - d_re * z_im) / zz;
    }
    return out;
}

inline cplx kummer_maclaurin(cplx a, double lambda) {
    const auto r = kummer_series<double>(a.real(), a.imag(), 0.0, lambda);
    return {r.m_re, r.m_im};
}

inline cplx kummer_maclaurin_dz(cplx a, double lambda) {
    const auto r = kummer_series<double>(a.real(), a.imag(), 0.0, lambda);
    return {r.dz_re, r.dz_im};
}

/// The series summed in 50-digit arithmetic. For Re a > 0 the terms grow like
/// e^|lambda| before they decay, so the double version loses digits quickly
/// past |lambda| ~ 10; this one stays accurate to |lambda| ~ 80.
inline cplx kummer_maclaurin_precise(cplx a, double lambda) {
    using R = boost::multiprecision::cpp_bin_float_50;
    const auto r = kummer_series<R>(R(a.real()), R(a.imag()), R(0), R(lambda));
    return {static_cast<double>(r.m_re), static_cast<double>(r.m_im)};
}

// ---------------------------------------------------------------------------
// Regularized integral representation, valid for -1 < Re a < 1.
//
//   M(a,1,z) = [Gamma(1-a)Gamma(1+a)]^{-1} [1 + a int_0^1 t^{a-1} E(t) dt],
//   E(t) = e^{zt}(1-t)^{-a} - 1.
//
// Splitting at t = 1/2 and putting the t^{a-1} piece of [1/2,1] back in gives
//   M = [..]^{-1} [2^{-a} + a (I_left + I_right)],
//   I_left  = int_0^{1/2} t^{a-1} E(t) dt          (t = e^{-w})
//   I_right = int_{1/2}^1 t^{a-1} e^{zt} (1-t)^{-a} dt   (1 - t = e^{-u})
// Both substitutions turn the endpoint singularities into exponential decay.

namespace detail {

inline void require_strip(cplx a) {
    if (!(std::abs(a.real()) < 1.0)) throw ParameterError("Kummer parameter outside the strip |Re a| < 1");
}

inline cplx cexpm1(cplx x) {
    const double s = std::sin(0.5 * x.imag());
    return {std::expm1(x.real()) * std::cos(x.imag()) - 2.0 * s * s, std::exp(x.real()) * std::sin(x.imag())};
}

inline double tail_end(double rate, double scale) {
    // e^{-rate * end} * scale ~ 1e-18, with a hard cap for rates near zero
    return std::min((std::log1p(scale) + 42.0) / std::max(rate, 1e-3), 5.0e4);
}

// Integral over w in [ln 2, inf) after a t = e^{-w} type substitution. The
// integrand oscillates like e^{i lambda t} and must decay at least like
// e^{-rate w}. Pieces hold about two oscillations while lambda*t is large.
template <class G>
cplx substituted_integral(G&& g, double rate, double lambda) {
    const double lam = std::abs(lambda);
    const double w_begin = std::log(2.0);
    const double w_end = w_begin + tail_end(rate, lam);
    // the phase lambda*t carries roundoff ~ eps*lambda, so the per-piece
    // tolerance cannot go below that
    const double tol = std::max(1e-11, 1e-13 * lam);
    cplx acc = 0.0;
    double w = w_begin;
    while (w < w_end) {
        const double t = std::exp(-w);
        double next;
        if (lam * t > 2.0) {
            const double dt = std::min(4.0 * pi / lam, 0.5 * t);
            next = -std::log(t - dt);
        } else {
            next = w + 4.0;
        }
        next = std::min(next, w_end);
        acc += quad::integrate(g, w, next, tol);
        w = next;
    }
    return acc;
}

}  // namespace detail

inline cplx kummer_integral(cplx a, double lambda) {
    detail::require_strip(a);
    const cplx z{0.0, lambda};
    auto left = [&](double w) -> cplx {
        const double t = std::exp(-w);
        const cplx e = detail::cexpm1(z * t - a * std::log1p(-t));
        return std::exp(-a * w) * e;
    };
    auto right = [&](double u) -> cplx {
        const double em = std::exp(-u);
        return std::exp((a - 1.0) * std::log1p(-em) + z * (1.0 - em) + (a - 1.0) * u);
    };
    const cplx il = detail::substituted_integral(left, 1.0 + a.real(), lambda);
    const cplx ir = detail::substituted_integral(right, 1.0 - a.real(), lambda);
    return inv_gamma_pair(a) * (std::exp(-a * std::log(2.0)) + a * (il + ir));
}

/// dM/dz(a,1,z) = [Gamma(a)Gamma(1-a)]^{-1} int_0^1 e^{zt} t^a (1-t)^{-a} dt.
inline cplx kummer_integral_dz(cplx a, double lambda) {
    detail::require_strip(a);
    if (a == 0.0) return 0.0;
    const cplx z{0.0, lambda};
    auto left = [&](double w) -> cplx {
        const double t = std::exp(-w);
        return std::exp(-(a + 1.0) * w + z * t - a * std::log1p(-t));
    };
    auto right = [&](double u) -> cplx {
        const double em = std::exp(-u);
        return std::exp(a * std::log1p(-em) + z * (1.0 - em) + (a - 1.0) * u);
    };
    const cplx il = detail::substituted_integral(left, 1.0 + a.real(), lambda);
    const cplx ir = detail::substituted_integral(right, 1.0 - a.real(), lambda);
    return std::sin(pi * a) / pi * (il + ir);
}

inline constexpr double kummer_switch_lambda = 10.0;

/// M(a, 1, i lambda): Maclaurin series for |lambda| < 10, regularized
/// integral otherwise.
inline cplx kummer_m(cplx a, double lambda) {
    detail::require_strip(a);
    if (std::abs(lambda) < kummer_switch_lambda) return kummer_maclaurin(a, lambda);
    return kummer_integral(a, lambda);
}

/// dM/dz at z = i lambda.
inline cplx kummer_m_dz(cplx a, double lambda) {
    detail::require_strip(a);
    if (std::abs(lambda) < kummer_switch_lambda) return kummer_maclaurin_dz(a, lambda);
    return kummer_integral_dz(a, lambda);
}

/// Leading large-|lambda| term e^{+-i pi a} (i lambda)^{-a} / Gamma(1-a),
/// sign taken from lambda. The companion e^z z^{a-1}/Gamma(a) term is one
/// power of lambda smaller for imaginary a and is dropped.
inline cplx kummer_asymptotic(cplx a, double lambda) {
    if (a == 0.0) return 1.0;
    const double sgn = lambda >= 0.0 ? 1.0 : -1.0;
    const cplx log_z{std::log(std::abs(lambda)), sgn * pi / 2};
    return std::exp(sgn * I * pi * a - a * log_z) / gamma_complex(1.0 - a);
}

/// Normalization of the Coulomb wave, (-i sigma)^{iZ/(2 sigma)} Gamma(1 - iZ/(2 sigma)),
/// principal branch of the power.
inline cplx coulomb_constant(double Z, double sigma) {
    const cplx a{0.0, Z / (2.0 * sigma)};
    if (a == 0.0) return 1.0;
    return std::exp(a * std::log(cplx{0.0, -sigma})) * gamma_complex(1.0 - a);
}

/// max |M(a,1,i lambda)| over a in i[-A, A], lambda in [-lambda_max, lambda_max],
/// on an n_a x n_lambda uniform grid. Uses M(conj a, 1, -i lambda) = conj M(a, 1, i lambda)
/// to visit only lambda >= 0.
inline double kummer_sup_scan(double A, double lambda_max, int n_a, int n_lambda) {
    if (!(A > 0.0)) throw ParameterError("sup scan needs A > 0");
    if (n_a < 1 || n_lambda < 1) throw ParameterError("sup scan grid must be nonempty");
    double best = 0.0;
    for (int i = 0; i < n_a; ++i) {
        const double ai = n_a == 1 ? 0.0 : -A + 2.0 * A * i / (n_a - 1);
        for (int k = 0; k < n_lambda; ++k) {
            const double lam = n_lambda == 1 ? 0.0 : -lambda_max + 2.0 * lambda_max * k / (n_lambda - 1);
            if (lam < 0.0) continue;
            best = std::max(best, std::abs(kummer_m(cplx{0.0, ai}, lam)));
        }
    }
    return best;
}

}  // namespace bscat
