#pragma once

// Time-domain Dyson terms (-G_0 M_V)^j G_0 f for the wave equation, the
// high-frequency cutoff, and the Fourier duality with the Born terms.
//
// G_0 f(t, x) = (1 / 4 pi) int f(t - |x - y|, y) / |x - y| dy
//
// The spatial quadrature is the corrected trapezoidal rule used for R_0; the
// retarded value f(t - rho) is cubic Lagrange interpolation in time.

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "bscat/born.hpp"
#include "bscat/fft.hpp"
#include "bscat/field.hpp"
#include "bscat/lattice.hpp"
#include "bscat/parallel.hpp"
#include "bscat/potential.hpp"
#include "bscat/resolvent.hpp"

namespace bscat {

/// Complex samples on a uniform spatial grid at times t0 + k dt, k < steps.
/// Values are time-major: value(k, i) = values[k * grid.size() + i].
struct SpacetimeField {
    GridDescriptor grid;
    double t0 = 0.0;
    double dt = 1.0;
    int steps = 0;
    std::vector<cplx> values;

    std::size_t spatial_size() const { return grid.size(); }
    std::size_t index(int k, std::size_t i) const { return static_cast<std::size_t>(k) * grid.size() + i; }
    double time(int k) const { return t0 + k * dt; }
    double t_max() const { return time(steps - 1); }
    cplx& at(int k, std::size_t i) { return values[index(k, i)]; }
    cplx at(int k, std::size_t i) const { return values[index(k, i)]; }

    static SpacetimeField zeros(const GridDescriptor& g, double t0, double dt, int steps) {
        SpacetimeField f;
        f.grid = g;
        f.t0 = t0;
        f.dt = dt;
        f.steps = steps;
        f.validate_shape();
        f.values.assign(static_cast<std::size_t>(steps) * g.size(), 0.0);
        return f;
    }

    template <class Fn>
    static SpacetimeField sample(const GridDescriptor& g, double t0, double dt, int steps, Fn&& fn) {
        auto f = zeros(g, t0, dt, steps);
        const std::size_t n = g.size();
        parallel_for(static_cast<std::size_t>(steps), [&](std::size_t k) {
            const double t = f.time(static_cast<int>(k));
            for (std::size_t i = 0; i < n; ++i) f.values[k * n + i] = fn(t, g.node(i));
        });
        return f;
    }

    ComplexField slice(int k) const {
        auto s = ComplexField::on_grid(grid);
        std::copy(values.begin() + index(k, 0), values.begin() + index(k + 1, 0), s.values.begin());
        return s;
    }

    void validate_shape() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ShapeError("time step must be positive");
        if (steps < 4) throw ShapeError("spacetime field needs at least four time samples");
        if (!(grid.h > 0.0)) throw ShapeError("spatial grid spacing must be positive");
    }
    void validate() const {
        validate_shape();
        if (values.size() != static_cast<std::size_t>(steps) * grid.size())
            throw ShapeError("spacetime field has the wrong number of values");
    }

    bool same_shape(const SpacetimeField& o) const {
        return grid.same_lattice(o.grid) && steps == o.steps && dt == o.dt && t0 == o.t0;
    }
    SpacetimeField& operator+=(const SpacetimeField& o) {
        if (!same_shape(o)) throw ShapeError("spacetime fields differ in shape");
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }
    SpacetimeField& operator*=(cplx c) {
        for (auto& v : values) v *= c;
        return *this;
    }
};

inline double l2_norm(const SpacetimeField& f) {
    double acc = 0.0;
    for (const auto& v : f.values) acc += std::norm(v);
    return std::sqrt(acc * f.dt * f.grid.h * f.grid.h * f.grid.h);
}

// ---------------------------------------------------------------------------
// Cubic Lagrange stencils in time.

/// Four nodes top, top-1, top-2, top-3 (in units of the time index) and the
/// weights reproducing a cubic at fractional index tau.
struct TimeStencil {
    int top = 0;
    std::array<double, 4> w{};
};

/// The stencil is centered on tau where possible but never uses nodes above
/// `cap`, so the rule stays causal at the latest available sample.
inline TimeStencil time_stencil(double tau, int cap) {
    TimeStencil s;
    s.top = std::min(static_cast<int>(std::floor(tau)) + 2, cap);
    for (int i = 0; i < 4; ++i) {
        const double ni = s.top - i;
        double w = 1.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) w *= (tau - (s.top - j)) / (ni - (s.top - j));
        s.w[i] = w;
    }
    return s;
}

/// Weights of d/dtau of the cubic through nodes top..top-3, at tau.
inline std::array<double, 4> time_stencil_derivative(double tau, int top) {
    std::array<double, 4> d{};
    for (int i = 0; i < 4; ++i) {
        const double ni = top - i;
        double denom = 1.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) denom *= ni - (top - j);
        double num = 0.0;
        for (int m = 0; m < 4; ++m) {
            if (m == i) continue;
            double p = 1.0;
            for (int j = 0; j < 4; ++j)
                if (j != i && j != m) p *= tau - (top - j);
            num += p;
        }
        d[i] = num / denom;
    }
    return d;
}

namespace detail {

/// Interpolate a time series at fractional index tau (samples below index 0
/// are zero), capping the stencil at `cap`.
template <class Get>
cplx interpolate_series(Get&& get, double tau, int cap) {
    const auto st = time_stencil(tau, cap);
    cplx acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        const int n = st.top - i;
        if (n >= 0) acc += st.w[i] * get(n);
    }
    return acc;
}

/// Leading samples must vanish: the window starts before the source turns on.
inline void require_quiet_start(const SpacetimeField& f, const char* what) {
    double peak = 0.0, head = 0.0;
    const std::size_t n = f.spatial_size();
    for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
        const double a = std::abs(f.values[idx]);
        peak = std::max(peak, a);
        if (idx < 2 * n) head = std::max(head, a);
    }
    if (peak > 0.0 && head > 1e-6 * peak)
        throw SupportError(std::string(what) + " is not quiet on the first two time samples");
}

}  // namespace detail

/// Retarded volume potential from a spacetime grid to itself, as one 4D
/// Toeplitz convolution over (time offset, spatial offset).
class RetardedGrid {
public:
    RetardedGrid(const GridDescriptor& g, double dt, int steps, int levels = 3)
        : grid_(g), dt_(dt), steps_(steps), levels_(levels) {
        if (!(dt > 0.0)) throw ShapeError("time step must be positive");
        const double h = g.h, h3 = h * h * h;
        const double c1 = lattice_singular_constant(1, {0, 0, 0}, levels);
        // self node: C_1 h^2 f(t) / 4 pi minus the smooth part h^3 d_t f / 4 pi
        const auto d = time_stencil_derivative(0.0, 0);
        std::array<double, 4> self{};
        for (int m = 0; m < 4; ++m) self[m] = -h3 * d[m] / dt / (4.0 * pi);
        self[0] += c1 * h * h / (4.0 * pi);
        conv_ = std::make_unique<ToeplitzConvolution>(
            std::vector<int>{steps, g.n[0], g.n[1], g.n[2]}, [=](const std::vector<int>& m) -> cplx {
                if (m[0] < 0) return 0.0;
                if (m[1] == 0 && m[2] == 0 && m[3] == 0) return m[0] < 4 ? self[m[0]] : 0.0;
                const double rho = h * std::sqrt(double(m[1]) * m[1] + double(m[2]) * m[2] + double(m[3]) * m[3]);
                const auto st = time_stencil(-rho / dt, 0);
                const int i = m[0] + st.top;  // node top - i sits at offset -(top - i)
                if (i < 0 || i > 3) return 0.0;
                return h3 / (4.0 * pi * rho) * st.w[i];
            });
    }

    const GridDescriptor& grid() const { return grid_; }
    double dt() const { return dt_; }
    int steps() const { return steps_; }

    SpacetimeField apply(const SpacetimeField& f) {
        require_shape(f);
        auto out = f;
        out.values = conv_->apply(f.values);
        return out;
    }

    /// G_0 (V b) with the per-center 1/r corrections of the spatial rule.
    SpacetimeField apply_potential(const SpacetimeField& b, const PotentialOnGrid& pot) {
        require_shape(b);
        const std::size_t n = b.spatial_size();
        std::vector<cplx> s(b.values.size());
        for (std::size_t idx = 0; idx < s.size(); ++idx) s[idx] = pot.V[idx % n] * b.values[idx];
        auto out = b;
        out.values = conv_->apply(s);
        add_center_corrections(out, b, pot);
        return out;
    }

    void add_center_corrections(SpacetimeField& out, const SpacetimeField& b, const PotentialOnGrid& pot) const {
        const double h2 = grid_.h * grid_.h;
        const std::size_t n = out.spatial_size();
        for (const auto& c : pot.centers) {
            if (c.c1 == 0.0) continue;
            std::vector<cplx> gc(steps_);
            for (int k = 0; k < steps_; ++k) gc[k] = trilinear(b.slice(k), c.pos);
            parallel_for(n, [&](std::size_t i) {
                const double rho = distance(grid_.node(i), c.pos);
                const double amp = -c.Z * c.c1 * h2 / (4.0 * pi * rho);
                for (int k = 0; k < steps_; ++k) {
                    const cplx g = detail::interpolate_series([&](int m) { return gc[m]; }, k - rho / dt_, k);
                    out.values[static_cast<std::size_t>(k) * n + i] += amp * g;
                }
            });
        }
    }

private:
    void require_shape(const SpacetimeField& f) const {
        f.validate();
        if (!f.grid.same_lattice(grid_) || f.steps != steps_ || f.dt != dt_)
            throw ShapeError("spacetime field does not match the retarded operator's grid");
    }

    GridDescriptor grid_;
    double dt_;
    int steps_;
    int levels_;
    std::unique_ptr<ToeplitzConvolution> conv_;
};

struct SpacetimePoint {
    double t = 0.0;
    Vec3 x;
};

/// Direct retarded sum at arbitrary spacetime targets, with the same local
/// corrections as the grid path (`pot` selects G_0 (V f)).
inline std::vector<cplx> retarded_apply_direct(const SpacetimeField& f, const std::vector<SpacetimePoint>& targets,
                                               int levels = 3, const PotentialOnGrid* pot = nullptr) {
    f.validate();
    detail::require_quiet_start(f, "retarded source");
    const auto& g = f.grid;
    const double h = g.h, h3 = h * h * h;
    const std::size_t n = f.spatial_size();
    std::vector<cplx> s(f.values.size());
    for (std::size_t idx = 0; idx < s.size(); ++idx) s[idx] = pot ? pot->V[idx % n] * f.values[idx] : f.values[idx];
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < f.steps; ++k)
            if (s[static_cast<std::size_t>(k) * n + i] != 0.0) {
                support.push_back(i);
                break;
            }
    const double c1_node = lattice_singular_constant(1, {0, 0, 0}, levels);
    // f at each charge center, per time sample
    std::vector<std::vector<cplx>> center_series;
    if (pot)
        for (const auto& c : pot->centers) {
            std::vector<cplx> gc(f.steps);
            if (c.c1 != 0.0)
                for (int k = 0; k < f.steps; ++k) gc[k] = trilinear(f.slice(k), c.pos);
            center_series.push_back(std::move(gc));
        }

    std::vector<cplx> out(targets.size());
    parallel_for(targets.size(), [&](std::size_t t) {
        const auto [time, x] = targets[t];
        const double u = (time - f.t0) / f.dt;
        if (u < -1e-9 || u > f.steps - 1 + 1e-9)
            throw SupportError("retarded target time outside the sampled window");
        const int cap = std::min(static_cast<int>(std::floor(u + 1e-9)), f.steps - 1);
        auto series = [&](std::size_t i) { return [&, i](int m) { return s[static_cast<std::size_t>(m) * n + i]; }; };

        const Vec3 q = (x - g.origin) / h;
        const Vec3 d = lattice_offset(q);
        const bool inside = q.x >= 0 && q.y >= 0 && q.z >= 0 && q.x <= g.n[0] - 1 && q.y <= g.n[1] - 1 &&
                            q.z <= g.n[2] - 1;
        const bool on_node = inside && norm(d) < 1e-9;
        cplx acc = 0.0;
        for (std::size_t i : support) {
            const double rho = distance(x, g.node(i));
            if (rho < 1e-9 * h) continue;
            acc += h3 / (4.0 * pi * rho) * detail::interpolate_series(series(i), u - rho / f.dt, cap);
        }
        if (on_node) {
            const std::size_t i = g.index(int(std::round(q.x)), int(std::round(q.y)), int(std::round(q.z)));
            const auto st = time_stencil(u, cap);
            const auto dw = time_stencil_derivative(u, st.top);
            cplx val = 0.0, der = 0.0;
            for (int m = 0; m < 4; ++m) {
                const int node = st.top - m;
                if (node < 0) continue;
                val += st.w[m] * s[static_cast<std::size_t>(node) * n + i];
                der += dw[m] * s[static_cast<std::size_t>(node) * n + i];
            }
            acc += c1_node * h * h / (4.0 * pi) * val - h3 / (4.0 * pi) * der / f.dt;
        } else if (inside) {
            const double c1 = lattice_singular_constant(1, d, levels);
            const auto st = time_stencil(u, cap);
            for (int m = 0; m < 4; ++m) {
                const int node = st.top - m;
                if (node < 0) continue;
                ComplexField sl = ComplexField::on_grid(g);
                std::copy(s.begin() + static_cast<std::ptrdiff_t>(node * n),
                          s.begin() + static_cast<std::ptrdiff_t>((node + 1) * n), sl.values.begin());
                acc += c1 * h * h / (4.0 * pi) * st.w[m] * trilinear(sl, x);
            }
        }
        if (pot) {
            for (std::size_t ci = 0; ci < pot->centers.size(); ++ci) {
                const auto& c = pot->centers[ci];
                if (c.c1 == 0.0) continue;
                const double rho = distance(x, c.pos);
                if (rho == 0.0) throw SingularPointError("retarded target at a charge center");
                auto gc = [&](int m) { return center_series[ci][m]; };
                acc += -c.Z * c.c1 * h * h / (4.0 * pi * rho) * detail::interpolate_series(gc, u - rho / f.dt, cap);
            }
        }
        out[t] = acc;
    });
    return out;
}

/// G_0 f on the source's own spacetime grid.
inline SpacetimeField retarded_apply(const SpacetimeField& f, int levels = 3) {
    f.validate();
    detail::require_quiet_start(f, "retarded source");
    RetardedGrid G(f.grid, f.dt, f.steps, levels);
    return G.apply(f);
}

/// Dyson recursion on one spacetime grid.
class DysonSolver {
public:
    DysonSolver(const GridDescriptor& g, double dt, int steps, const ChargeConfiguration& cfg, int levels = 3)
        : cfg_(cfg), G_(g, dt, steps, levels), pot_(PotentialOnGrid::build(g, cfg, levels)) {}

    const PotentialOnGrid& potential() const { return pot_; }

    SpacetimeField first(const SpacetimeField& f) {
        detail::require_quiet_start(f, "Dyson source");
        return G_.apply(f);
    }

    /// -G_0 (V b)
    SpacetimeField next(const SpacetimeField& b) {
        if (cfg_.empty()) return SpacetimeField::zeros(b.grid, b.t0, b.dt, b.steps);
        auto out = G_.apply_potential(b, pot_);
        out *= -1.0;
        return out;
    }

    std::vector<SpacetimeField> terms(const SpacetimeField& f, int J) {
        if (J < 0) throw ParameterError("Dyson order must be nonnegative");
        std::vector<SpacetimeField> out;
        out.push_back(first(f));
        for (int j = 1; j <= J; ++j) out.push_back(next(out.back()));
        return out;
    }

private:
    ChargeConfiguration cfg_;
    RetardedGrid G_;
    PotentialOnGrid pot_;
};

inline SpacetimeField dyson_term(const SpacetimeField& f, int j, const ChargeConfiguration& cfg, int levels = 3) {
    f.validate();
    DysonSolver solver(f.grid, f.dt, f.steps, cfg, levels);
    return solver.terms(f, j).back();
}

// ---------------------------------------------------------------------------
// High-frequency cutoff 1_{|sigma| > Sigma} acting in the temporal DFT domain.

enum class CutoffEdge { sharp, raised_cosine };

/// Angular frequency of DFT bin k for T samples spaced dt.
inline double dft_frequency(int k, int T, double dt) {
    const int kk = k <= T / 2 ? k : k - T;
    return 2.0 * pi * kk / (T * dt);
}

inline double cutoff_mask(double sigma, double Sigma, CutoffEdge edge, double width_frac) {
    const double a = std::abs(sigma);
    const double W = width_frac * Sigma;
    if (edge == CutoffEdge::sharp || W == 0.0) return a >= Sigma ? 1.0 : 0.0;
    if (a <= Sigma - 0.5 * W) return 0.0;
    if (a >= Sigma + 0.5 * W) return 1.0;
    return 0.5 * (1.0 - std::cos(pi * (a - Sigma + 0.5 * W) / W));
}

/// Multiply every spatial node's temporal DFT by `mask(sigma)` and invert.
template <class Mask>
SpacetimeField temporal_filter(const SpacetimeField& u, Mask&& mask) {
    u.validate();
    const int T = u.steps;
    const std::size_t n = u.spatial_size();
    std::vector<double> m(T);
    for (int k = 0; k < T; ++k) m[k] = mask(dft_frequency(k, T, u.dt));
    auto out = u;
    FftBuffer buf(static_cast<std::size_t>(T));
    FftPlan plan(buf, {T});
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < T; ++k) buf[k] = u.at(k, i);
        plan.forward();
        for (int k = 0; k < T; ++k) buf[k] *= m[k] / T;
        plan.backward();
        for (int k = 0; k < T; ++k) out.at(k, i) = buf[k];
    }
    return out;
}

inline SpacetimeField highfreq_cutoff(const SpacetimeField& u, double Sigma, CutoffEdge edge = CutoffEdge::raised_cosine,
                                      double width_frac = 0.05) {
    if (!(Sigma >= 0.0)) throw ParameterError("cutoff threshold must be nonnegative");
    if (!(width_frac >= 0.0 && width_frac < 1.0)) throw ParameterError("transition width must lie in [0, 1)");
    if (!(u.dt * Sigma < pi)) throw ResolutionError("cutoff threshold at or beyond the Nyquist frequency (dt * Sigma >= pi)");
    return temporal_filter(u, [&](double s) { return cutoff_mask(s, Sigma, edge, width_frac); });
}

/// Fraction of the temporal spectral energy with |sigma| >= Sigma.
inline double highband_fraction(const SpacetimeField& u, double Sigma) {
    const auto hi = highfreq_cutoff(u, Sigma, CutoffEdge::sharp);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        a += std::norm(hi.values[i]);
        b += std::norm(u.values[i]);
    }
    return b > 0.0 ? a / b : 0.0;
}

// ---------------------------------------------------------------------------
// Fourier duality: F(D_j f)(sigma) against B_j(sigma - i0) F(f)(sigma), with
// F(g)(sigma, x) = sum_k dt e^{-i sigma t_k} g(t_k, x). Under this transform
// G_0 becomes the kernel e^{-i sigma rho} / 4 pi rho, i.e. R_0 at -sigma.

inline ComplexField temporal_transform(const SpacetimeField& u, double sigma) {
    auto out = ComplexField::on_grid(u.grid);
    const std::size_t n = u.spatial_size();
    std::vector<cplx> phase(u.steps);
    for (int k = 0; k < u.steps; ++k) phase[k] = u.dt * std::exp(cplx{0.0, -sigma * u.time(k)});
    parallel_for(n, [&](std::size_t i) {
        cplx acc = 0.0;
        for (int k = 0; k < u.steps; ++k) acc += phase[k] * u.at(k, i);
        out.values[i] = acc;
    });
    return out;
}

struct DualityReport {
    int j = 0;
    std::vector<double> sigma;
    std::vector<double> rel_discrepancy;
    int grid_nodes = 0;
    double grid_spacing = 0.0;
    int time_steps = 0;
    double dt = 0.0;
};

inline DualityReport fourier_duality_check(const SpacetimeField& f, int j, const std::vector<double>& sigma_probe,
                                           const ChargeConfiguration& cfg, const QuadratureSpec& q) {
    f.validate();
    q.validate();
    for (double s : sigma_probe) {
        if (!(std::abs(s) * f.dt < pi)) throw ResolutionError("probe frequency beyond the temporal Nyquist limit");
        detail::check_resolution(f.grid, s, q);
    }
    DualityReport rep;
    rep.j = j;
    rep.grid_nodes = f.grid.n[0];
    rep.grid_spacing = f.grid.h;
    rep.time_steps = f.steps;
    rep.dt = f.dt;
    const auto D = dyson_term(f, j, cfg, q.singular_refinement_depth);
    for (double s : sigma_probe) {
        const auto lhs = temporal_transform(D, s);
        const auto rhs = born_term(temporal_transform(f, s), j, -s, cfg, q);
        const double den = plain_l2_norm(rhs);
        const double num = plain_l2_norm(lhs - rhs);
        rep.sigma.push_back(s);
        rep.rel_discrepancy.push_back(den > 0.0 ? num / den : (num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()));
    }
    return rep;
}

/// Pulse family for the duality experiments:
/// f(t, x) = e^{i omega t} exp(-(t - t_c)^2 / tau^2) exp(-|x - x0|^2 / width^2).
struct PulseSpec {
    double omega = 10.0;
    double t_center = 1.2;
    double tau = 0.3;
    Vec3 center;
    double width = 0.2;

    cplx operator()(double t, const Vec3& x) const {
        const double dt = t - t_center;
        const Vec3 y = x - center;
        return std::exp(cplx{-dt * dt / (tau * tau) - dot(y, y) / (width * width), omega * t});
    }
    SpacetimeField sample(const GridDescriptor& g, double t_max, int steps) const {
        return SpacetimeField::sample(g, 0.0, t_max / (steps - 1), steps, *this);
    }
};

}  // namespace bscat
