#pragma once

// Plane-wave ansatze for the short-range, Coulomb and dipole cases, exact
// single-center Coulomb waves, and the sources f = P(ansatz).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bscat/born.hpp"
#include "bscat/field.hpp"
#include "bscat/potential.hpp"
#include "bscat/quadrature.hpp"
#include "bscat/resolvent.hpp"
#include "bscat/specfun.hpp"

namespace bscat {

// ---------------------------------------------------------------------------
// Exact Coulomb wave u = C e^{i sigma x} M(iZ/(2 sigma), 1, i sigma (r - x)).

/// r - x without cancellation near the forward axis.
inline double r_minus_x(const Vec3& p) {
    const double r = norm(p);
    if (p.x <= 0.0) return r - p.x;
    return (p.y * p.y + p.z * p.z) / (r + p.x);
}

inline cplx exact_coulomb_wave(double Z, double sigma, const Vec3& p) {
    if (p == Vec3{}) throw SingularPointError("Coulomb wave evaluated at the origin");
    const cplx plane = std::exp(cplx{0.0, sigma * p.x});
    if (Z == 0.0) return plane;
    const cplx a{0.0, Z / (2.0 * sigma)};
    return coulomb_constant(Z, sigma) * plane * kummer_m(a, sigma * r_minus_x(p));
}

/// Gradient of the exact Coulomb wave from dM/dz:
/// grad u = C e^{i sigma x} [i sigma M e_x + i sigma M' (x/r - e_x)].
inline std::array<cplx, 3> exact_coulomb_wave_gradient(double Z, double sigma, const Vec3& p) {
    if (p == Vec3{}) throw SingularPointError("Coulomb wave evaluated at the origin");
    const cplx a{0.0, Z / (2.0 * sigma)};
    const double lam = sigma * r_minus_x(p);
    const cplx C = Z == 0.0 ? cplx(1.0) : coulomb_constant(Z, sigma);
    const cplx M = Z == 0.0 ? cplx(1.0) : kummer_m(a, lam);
    const cplx dM = Z == 0.0 ? cplx(0.0) : kummer_m_dz(a, lam);
    const cplx pre = C * std::exp(cplx{0.0, sigma * p.x}) * I * sigma;
    const double r = norm(p);
    const Vec3 grad_rx = p / r - Vec3{1.0, 0.0, 0.0};
    return {pre * (M + dM * grad_rx.x), pre * dM * grad_rx.y, pre * dM * grad_rx.z};
}

/// Exact Coulomb wave at fixed (Z, sigma) for bulk sampling. Given a radius
/// bound it interpolates lambda -> M(a, 1, i lambda) by cubic Hermite pieces
/// of width 0.01 (values and slopes from kummer_m / kummer_m_dz, error near
/// 1e-11); points outside the table are evaluated directly.
class CoulombWave {
public:
    CoulombWave(double Z, double sigma, double r_bound = 0.0)
        : Z_(Z), sigma_(sigma), a_{0.0, Z / (2.0 * sigma)} {
        if (Z == 0.0) return;
        C_ = coulomb_constant(Z, sigma);
        if (!(r_bound > 0.0)) return;
        const double span = 2.0 * sigma * r_bound;
        lo_ = std::min(0.0, span);
        const int n = static_cast<int>(std::ceil(std::abs(span) / step)) + 2;
        M_.resize(n);
        dM_.resize(n);
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
            const double lam = lo_ + static_cast<double>(i) * step;
            M_[i] = kummer_m(a_, lam);
            dM_[i] = I * kummer_m_dz(a_, lam) * step;  // d/dlambda, scaled to a unit piece
        });
    }

    static constexpr double step = 0.01;

    cplx m(double lam) const {
        const double s = (lam - lo_) / step;
        const auto i = static_cast<std::ptrdiff_t>(std::floor(s));
        if (M_.empty() || i < 0 || i + 1 >= static_cast<std::ptrdiff_t>(M_.size())) return kummer_m(a_, lam);
        const double t = s - static_cast<double>(i), t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * M_[i] + (t3 - 2 * t2 + t) * dM_[i] + (-2 * t3 + 3 * t2) * M_[i + 1] +
               (t3 - t2) * dM_[i + 1];
    }

    cplx operator()(const Vec3& p) const {
        if (p == Vec3{}) throw SingularPointError("Coulomb wave evaluated at the origin");
        const cplx plane = std::exp(cplx{0.0, sigma_ * p.x});
        if (Z_ == 0.0) return plane;
        return C_ * plane * m(sigma_ * r_minus_x(p));
    }

private:
    double Z_, sigma_;
    cplx a_, C_{1.0};
    double lo_ = 0.0;
    std::vector<cplx> M_, dM_;
};

/// Comparison function e^{i sigma x} (r - x)^{-iZ/(2 sigma)} of the large-r expansion.
inline cplx coulomb_log_phase_wave(double Z, double sigma, const Vec3& p) {
    const cplx a{0.0, Z / (2.0 * sigma)};
    return std::exp(cplx{0.0, sigma * p.x} - a * std::log(r_minus_x(p)));
}

struct AsymptoticCheck {
    double exponent = std::numeric_limits<double>::quiet_NaN();  // remainder against the log-phase wave
    double confidence = 0.0;
    double control_exponent = std::numeric_limits<double>::quiet_NaN();  // remainder against e^{i sigma x}
    double control_confidence = 0.0;
    bool remainder_vanishes = false;  // Z = 0
    std::vector<double> radii, amplitudes, control_amplitudes;
};

/// Fit the decay of u - e^{i sigma x}(r - x)^{-iZ/2sigma} on shells of the
/// given cone (default: backward cone about -x).
inline AsymptoticCheck asymptotic_phase_check(double Z, double sigma, const std::vector<double>& radii,
                                              ConeSpec cone = {{-1.0, 0.0, 0.0}, 15.0, 0.05}) {
    std::vector<Vec3> pts;
    for (double R : radii)
        for (const auto& p : cone_shell_points(cone, R)) pts.push_back(p);
    auto rem = ComplexField::cloud(pts);
    auto ctl = ComplexField::cloud(pts);
    bool all_zero = true;
    parallel_for(pts.size(), [&](std::size_t i) {
        const cplx u = exact_coulomb_wave(Z, sigma, pts[i]);
        rem.values[i] = u - coulomb_log_phase_wave(Z, sigma, pts[i]);
        ctl.values[i] = u - std::exp(cplx{0.0, sigma * pts[i].x});
    });
    for (const auto& v : rem.values) all_zero = all_zero && v == cplx(0.0);
    AsymptoticCheck out;
    if (all_zero) {
        out.remainder_vanishes = true;
        return out;
    }
    const auto fit = decay_exponent(rem, cone, radii);
    const auto cfit = decay_exponent(ctl, cone, radii);
    out.exponent = fit.exponent;
    out.confidence = fit.confidence;
    out.control_exponent = cfit.exponent;
    out.control_confidence = cfit.confidence;
    out.radii = fit.radii;
    out.amplitudes = fit.amplitudes;
    out.control_amplitudes = cfit.amplitudes;
    return out;
}

// ---------------------------------------------------------------------------
// Dipole correction v(x) = -int_{-inf}^x (s a1 + y a2 + z a3) / (s^2 + y^2 + z^2)^{3/2} ds.

/// Closed form, valid off the x-axis.
inline double dipole_v_closed(const Vec3& p, const Vec3& a) {
    const double rho2 = p.y * p.y + p.z * p.z;
    if (rho2 == 0.0) throw DomainError("closed form of v needs y^2 + z^2 > 0");
    const double r = norm(p);
    // 1 + x/r written stably for x < 0
    const double one_plus = p.x >= 0.0 ? 1.0 + p.x / r : rho2 / (r * (r - p.x));
    return a.x / r - (p.y * a.y + p.z * a.z) / rho2 * one_plus;
}

namespace detail {

/// int_{-inf}^{x} g(s) ds for an integrand decaying like s^{-2}, split at
/// scale-aware breakpoints around the near-axis peak at s = 0.
template <class G>
double integral_to_x(G&& g, double x, double width) {
    const double w = std::max(width, 1e-12);
    std::vector<double> cuts{x};
    for (double s = w; s < 1e8 * w; s *= 4.0) {
        if (-s < x) cuts.push_back(-s);
        if (s < x) cuts.push_back(s);
    }
    if (x > 0.0) cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) acc += quad::integrate(g, cuts[k], cuts[k + 1], 1e-13);
    // (-inf, s0] via s = s0 / (1 - u), s0 < 0
    const double s0 = cuts.front();
    auto tail = [&](double u) {
        const double m = 1.0 - u;
        return g(s0 / m) * -s0 / (m * m);
    };
    acc += quad::integrate(tail, 0.0, 1.0, 1e-13);
    return acc;
}

inline double dipole_width(const Vec3& p) {
    const double rho = std::sqrt(p.y * p.y + p.z * p.z);
    return rho > 0.0 ? rho : std::abs(p.x);
}

inline void require_convergent(const Vec3& p) {
    if (p.y == 0.0 && p.z == 0.0 && p.x >= 0.0)
        throw DivergentIntegralError("v diverges on the forward x-axis");
}

}  // namespace detail

/// v by direct quadrature of its defining integral.
inline double dipole_v_integral(const Vec3& p, const Vec3& a) {
    detail::require_convergent(p);
    const double b = p.y * a.y + p.z * a.z, rho2 = p.y * p.y + p.z * p.z;
    auto g = [&](double s) {
        const double D = s * s + rho2;
        return (s * a.x + b) / (D * std::sqrt(D));
    };
    return -detail::integral_to_x(g, p.x, detail::dipole_width(p));
}

inline double dipole_v(const Vec3& p, const Vec3& a) {
    detail::require_convergent(p);
    if (p.y == 0.0 && p.z == 0.0) return dipole_v_integral(p, a);
    return dipole_v_closed(p, a);
}

/// d v / d x = -(x . a) / r^3 (fundamental theorem of calculus).
inline double dipole_v_dx(const Vec3& p, const Vec3& a) {
    const double r = norm(p);
    return -dot(p, a) / (r * r * r);
}

/// d^2 v / dx^2 = -a1/r^3 + 3 x (x . a)/r^5.
inline double dipole_v_dxx(const Vec3& p, const Vec3& a) {
    const double r = norm(p), r2 = r * r;
    return -a.x / (r2 * r) + 3.0 * p.x * dot(p, a) / (r2 * r2 * r);
}

/// d v / d y_k (k = 1 for y, 2 for z) by quadrature of the differentiated integrand
///   a_k D^{-3/2} - 3 q y_k D^{-5/2},  q = s a1 + y a2 + z a3, D = s^2 + y^2 + z^2.
inline double dipole_v_dperp(const Vec3& p, const Vec3& a, int k) {
    detail::require_convergent(p);
    const double yk = p[k], ak = a[k];
    const double b = p.y * a.y + p.z * a.z, rho2 = p.y * p.y + p.z * p.z;
    auto g = [&](double s) {
        const double D = s * s + rho2, q = s * a.x + b;
        const double D32 = D * std::sqrt(D);
        return ak / D32 - 3.0 * q * yk / (D32 * D);
    };
    return -detail::integral_to_x(g, p.x, detail::dipole_width(p));
}

/// d^2 v / d y_k^2 by quadrature of
///   -6 a_k y_k D^{-5/2} - 3 q D^{-5/2} + 15 q y_k^2 D^{-7/2}.
inline double dipole_v_dperp2(const Vec3& p, const Vec3& a, int k) {
    detail::require_convergent(p);
    const double yk = p[k], ak = a[k];
    const double b = p.y * a.y + p.z * a.z, rho2 = p.y * p.y + p.z * p.z;
    auto g = [&](double s) {
        const double D = s * s + rho2, q = s * a.x + b;
        const double D52 = D * D * std::sqrt(D);
        return -6.0 * ak * yk / D52 - 3.0 * q / D52 + 15.0 * q * yk * yk / (D52 * D);
    };
    return -detail::integral_to_x(g, p.x, detail::dipole_width(p));
}

// ---------------------------------------------------------------------------
// Ansatz cases.

enum class AnsatzKind { short_range, coulomb, dipole };

inline std::string to_string(AnsatzKind k) {
    switch (k) {
        case AnsatzKind::short_range: return "short_range";
        case AnsatzKind::coulomb: return "coulomb";
        case AnsatzKind::dipole: return "dipole";
    }
    return "?";
}

inline AnsatzKind parse_ansatz_kind(const std::string& s) {
    if (s == "short_range") return AnsatzKind::short_range;
    if (s == "coulomb") return AnsatzKind::coulomb;
    if (s == "dipole") return AnsatzKind::dipole;
    throw ConfigError("unknown ansatz kind '" + s + "' (expected short_range, coulomb or dipole)");
}

/// Smooth step: 1 for t <= t0, 0 for t >= t1, C-infinity in between.
inline double smooth_step_down(double t, double t0, double t1) {
    if (t <= t0) return 1.0;
    if (t >= t1) return 0.0;
    const double u = (t - t0) / (t1 - t0);
    auto psi = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    return psi(1.0 - u) / (psi(1.0 - u) + psi(u));
}

struct AnsatzCase {
    AnsatzKind kind = AnsatzKind::short_range;
    double sigma = 1.0;
    ChargeConfiguration cfg;
    MultipoleMoments moments;
    double r_on = 0.0;         // chi(1/r) = 1 for r >= r_on, 0 for r <= r_on / 2
    double cone_inner = 0.5;   // cone cutoff = 1 for sqrt(y^2+z^2)/|x| <= cone_inner
    double cone_outer = 1.0;   // ... and 0 beyond cone_outer

    /// Validates the case invariants; r_on defaults to 5 max|x_n| (1 when all
    /// charges sit at the origin).
    static AnsatzCase make(AnsatzKind kind, double sigma, const ChargeConfiguration& cfg,
                           std::optional<double> r_on = std::nullopt) {
        AnsatzCase c;
        c.kind = kind;
        c.sigma = sigma;
        c.cfg = cfg;
        c.moments = multipole_moments(cfg);
        const double R = cfg.cluster_radius();
        c.r_on = r_on ? *r_on : (R > 0.0 ? 5.0 * R : 1.0);
        c.validate();
        return c;
    }

    void validate() const {
        if (!(sigma != 0.0) || !std::isfinite(sigma)) throw AnsatzCaseError("ansatz needs a nonzero finite sigma");
        if (!(r_on > 0.0)) throw AnsatzCaseError("ansatz r_on must be positive");
        if (!(0.0 < cone_inner && cone_inner < cone_outer)) throw AnsatzCaseError("cone cutoff widths must satisfy 0 < inner < outer");
        double scale = 0.0;
        for (const auto& q : cfg.charges()) scale += std::abs(q.Z) * (1.0 + norm(q.pos));
        const double eps = 1e-12 * std::max(scale, 1.0);
        const bool Z0 = std::abs(moments.total_charge) <= eps;
        const bool a0 = norm(moments.dipole) <= eps;
        switch (kind) {
            case AnsatzKind::short_range:
                if (!Z0 || !a0) throw AnsatzCaseError("short_range ansatz needs vanishing total charge and dipole moment");
                break;
            case AnsatzKind::coulomb:
                if (Z0) throw AnsatzCaseError("coulomb ansatz needs nonzero total charge");
                if (!a0) throw AnsatzCaseError("coulomb ansatz needs a recentred configuration (dipole moment zero)");
                if (cfg.screening_rate() != 0.0) throw AnsatzCaseError("coulomb ansatz needs an unscreened configuration");
                break;
            case AnsatzKind::dipole:
                if (!Z0) throw AnsatzCaseError("dipole ansatz needs vanishing total charge");
                if (a0) throw AnsatzCaseError("dipole ansatz needs a nonzero dipole moment");
                if (cfg.screening_rate() != 0.0) throw AnsatzCaseError("dipole ansatz needs an unscreened configuration");
                break;
        }
    }

    double chi_radial(const Vec3& p) const {
        const double r = norm(p);
        if (r == 0.0) return 0.0;
        return smooth_step_down(1.0 / r, 1.0 / r_on, 2.0 / r_on);
    }

    /// chi(sqrt(y^2+z^2)/x) 1_{x <= 0}
    double chi_cone(const Vec3& p) const {
        if (p.x > 0.0) return 0.0;
        const double rho = std::sqrt(p.y * p.y + p.z * p.z);
        if (p.x == 0.0) return rho == 0.0 ? 1.0 : 0.0;
        return smooth_step_down(rho / -p.x, cone_inner, cone_outer);
    }

    /// Localizer of the dipole correction.
    double eta(const Vec3& p) const { return chi_radial(p) * chi_cone(p); }

    /// Does the 7-point stencil of spacing h around p see only eta == 1?
    bool in_upsilon(const Vec3& p, double h) const {
        for (int d = -1; d < 3; ++d) {
            for (int s : {-1, 1}) {
                Vec3 q = p;
                if (d >= 0) q[d] += s * h;
                if (eta(q) != 1.0) return false;
            }
        }
        return true;
    }
    /// ... or only eta == 0?
    bool off_support(const Vec3& p, double h) const {
        for (int d = -1; d < 3; ++d)
            for (int s : {-1, 1}) {
                Vec3 q = p;
                if (d >= 0) q[d] += s * h;
                if (eta(q) != 0.0) return false;
            }
        return true;
    }
};

namespace detail {

template <class Wave>
cplx ansatz_value(const AnsatzCase& c, const Vec3& p, const Wave& wave) {
    const cplx plane = std::exp(cplx{0.0, c.sigma * p.x});
    switch (c.kind) {
        case AnsatzKind::short_range: return plane;
        case AnsatzKind::coulomb: {
            const double chi = c.chi_radial(p);
            return chi == 0.0 ? cplx(0.0) : chi * wave(p);
        }
        case AnsatzKind::dipole: {
            const double e = c.eta(p);
            if (e == 0.0) return plane;
            return plane * (1.0 + e * dipole_v(p, c.moments.dipole) / (2.0 * I * c.sigma));
        }
    }
    return 0.0;
}

inline double max_radius(const std::vector<Vec3>& pts) {
    double r = 0.0;
    for (const auto& p : pts) r = std::max(r, norm(p));
    return r;
}

/// Tabulated wave for many points, direct evaluation for a few.
inline CoulombWave bulk_wave(const AnsatzCase& c, const std::vector<Vec3>& pts, double pad) {
    const double Z = c.kind == AnsatzKind::coulomb ? c.moments.total_charge : 0.0;
    return CoulombWave(Z, c.sigma, pts.size() > 2000 ? max_radius(pts) + 2.0 * pad : 0.0);
}

}  // namespace detail

/// The ansatz at a single point.
inline cplx ansatz_value(const AnsatzCase& c, const Vec3& p) {
    auto wave = [&](const Vec3& q) { return exact_coulomb_wave(c.moments.total_charge, c.sigma, q); };
    return detail::ansatz_value(c, p, wave);
}

inline ComplexField build_ansatz(const AnsatzCase& c, const ComplexField& like) {
    c.validate();
    ComplexField out = like;
    const auto wave = detail::bulk_wave(c, out.points, 0.0);
    parallel_for(out.size(), [&](std::size_t i) { out.values[i] = detail::ansatz_value(c, out.points[i], wave); });
    return out;
}

inline ComplexField build_ansatz(const AnsatzCase& c, const std::vector<Vec3>& points) {
    return build_ansatz(c, ComplexField::cloud(points));
}

namespace detail {

template <class Fn>
cplx stencil_laplacian(Fn&& u, const Vec3& p, double h) {
    cplx acc = -6.0 * u(p);
    for (int d = 0; d < 3; ++d) {
        Vec3 q = p;
        q[d] += h;
        acc += u(q);
        q[d] -= 2.0 * h;
        acc += u(q);
    }
    return acc / (h * h);
}

}  // namespace detail

/// Finite-difference spacing for the commutator and transition-zone terms.
/// These are pointwise stencils, independent of any grid: at spacing h the
/// commutator carries a relative error near (sigma h)^2 / 6.
inline double default_fd_spacing(const AnsatzCase& c) {
    return std::min(c.r_on / 64.0, 0.05 / std::abs(c.sigma));
}

namespace detail {

template <class Wave>
cplx ansatz_source_value(const AnsatzCase& c, const Vec3& p, double h, const Wave& wave) {
    const cplx plane = std::exp(cplx{0.0, c.sigma * p.x});
    const double V = c.cfg.empty() ? 0.0 : evaluate_potential(c.cfg, p);
    switch (c.kind) {
        case AnsatzKind::short_range: return plane * V;
        case AnsatzKind::coulomb: {
            const double Z = c.moments.total_charge;
            const double r = norm(p);
            // -W chi u_ex with W = -V - Z/r
            const double W = -V - Z / r;
            const double chi = c.chi_radial(p);
            cplx f = chi == 0.0 ? cplx(0.0) : -W * chi * wave(p);
            // [-Lap, chi] u_ex = -Lap(chi u) + chi Lap u on the annulus
            if (r - h < c.r_on && r + h > 0.5 * c.r_on) {
                auto chiu = [&](const Vec3& q) { return c.chi_radial(q) * wave(q); };
                f += -stencil_laplacian(chiu, p, h) + chi * stencil_laplacian(wave, p, h);
            }
            return f;
        }
        case AnsatzKind::dipole: {
            const Vec3& a = c.moments.dipole;
            if (c.off_support(p, h)) return plane * V;
            if (c.in_upsilon(p, h)) {
                // On Upsilon: V + x.a/r^3 is the remainder after the dipole term,
                // and -d_x v cancels the dipole part of V exactly.
                const double r = norm(p);
                const double rem = V + dot(p, a) / (r * r * r);
                const double v = dipole_v(p, a);
                const double Pv = -dipole_v_dxx(p, a) - dipole_v_dperp2(p, a, 1) - dipole_v_dperp2(p, a, 2) + V * v;
                return plane * (rem + Pv / (2.0 * I * c.sigma));
            }
            auto u1 = [&](const Vec3& q) { return ansatz_value(c, q, wave); };
            return -stencil_laplacian(u1, p, h) + (V - c.sigma * c.sigma) * u1(p);
        }
    }
    return 0.0;
}

}  // namespace detail

/// f = P(ansatz) at one point; `h` is the finite-difference spacing.
inline cplx ansatz_source_value(const AnsatzCase& c, const Vec3& p, double h) {
    auto wave = [&](const Vec3& q) { return exact_coulomb_wave(c.moments.total_charge, c.sigma, q); };
    return detail::ansatz_source_value(c, p, h, wave);
}

/// f = P(ansatz). Grids must resolve sigma (sigma h < 0.5) for the Born terms
/// that consume f; the stencils themselves use `fd_spacing`.
inline ComplexField ansatz_source(const AnsatzCase& c, const ComplexField& like, std::optional<double> fd_spacing = {}) {
    c.validate();
    const double h = fd_spacing ? *fd_spacing : default_fd_spacing(c);
    if (!(h > 0.0)) throw ParameterError("finite-difference spacing must be positive");
    if (like.grid && !(std::abs(c.sigma) * like.grid->h < resolution_limit))
        throw ResolutionError("grid spacing too coarse for sigma (need sigma*h < 0.5)");
    ComplexField out = like;
    const auto wave = detail::bulk_wave(c, out.points, h);
    parallel_for(out.size(),
                 [&](std::size_t i) { out.values[i] = detail::ansatz_source_value(c, out.points[i], h, wave); });
    return out;
}

/// Naive plane-wave source e^{i sigma x} V, the comparison for the corrected cases.
inline ComplexField plane_wave_source(const AnsatzCase& c, const ComplexField& like) {
    ComplexField out = like;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = std::exp(cplx{0.0, c.sigma * out.points[i].x}) * evaluate_potential(c.cfg, out.points[i]);
    return out;
}

/// u = ansatz - sum_{j <= J} B_j f on the grid of `like`.
inline ComplexField perturbed_plane_wave(const AnsatzCase& c, int J, const ComplexField& like, const QuadratureSpec& q) {
    if (!like.grid) throw ShapeError("perturbed plane wave needs grid targets");
    auto u = build_ansatz(c, like);
    const auto f = ansatz_source(c, like);
    BornSolver solver(*like.grid, c.sigma, c.cfg, q);
    for (const auto& t : solver.terms(f, J)) u -= t;
    return u;
}

}  // namespace bscat
