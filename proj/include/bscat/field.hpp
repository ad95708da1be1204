#pragma once

// Sampled complex fields, weighted norms, the finite-difference operator
// P = -Laplacian + V - sigma^2, decay-exponent fits and the Hardy check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bscat/core.hpp"
#include "bscat/lattice.hpp"
#include "bscat/potential.hpp"

namespace bscat {

/// Uniform cubic grid. Node (i, j, k) sits at origin + h (i, j, k); nodes are
/// stored with i slowest. `margin` counts invalid layers on each face left
/// behind by finite-difference operators.
struct GridDescriptor {
    Vec3 origin;
    double h = 1.0;
    std::array<int, 3> n{0, 0, 0};
    int margin = 0;

    std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k;
    }
    Vec3 node(int i, int j, int k) const { return origin + h * Vec3{double(i), double(j), double(k)}; }
    Vec3 node(std::size_t idx) const {
        const int k = static_cast<int>(idx % n[2]);
        const int j = static_cast<int>((idx / n[2]) % n[1]);
        const int i = static_cast<int>(idx / (static_cast<std::size_t>(n[1]) * n[2]));
        return node(i, j, k);
    }
    std::array<int, 3> ijk(std::size_t idx) const {
        return {static_cast<int>(idx / (static_cast<std::size_t>(n[1]) * n[2])),
                static_cast<int>((idx / n[2]) % n[1]), static_cast<int>(idx % n[2])};
    }
    bool valid(int i, int j, int k) const {
        return i >= margin && j >= margin && k >= margin && i < n[0] - margin && j < n[1] - margin &&
               k < n[2] - margin;
    }
    bool same_lattice(const GridDescriptor& o) const { return origin == o.origin && h == o.h && n == o.n; }

    /// Cube of side 2*half_width centred at `center`, spacing at most h_max.
    /// The node count per axis is even, so the centre falls in the middle of a cell.
    static GridDescriptor cube(const Vec3& center, double half_width, double h_max) {
        if (!(half_width > 0.0) || !(h_max > 0.0)) throw ParameterError("grid needs positive size and spacing");
        int cells = static_cast<int>(std::ceil(2.0 * half_width / h_max));
        if (cells % 2 == 0) ++cells;  // odd cell count -> even node count
        GridDescriptor g;
        g.h = 2.0 * half_width / cells;
        g.n = {cells + 1, cells + 1, cells + 1};
        g.origin = center - Vec3{half_width, half_width, half_width};
        return g;
    }
};

struct ComplexField {
    std::vector<Vec3> points;
    std::vector<cplx> values;
    std::vector<double> weights;
    std::optional<GridDescriptor> grid;

    std::size_t size() const { return values.size(); }

    static ComplexField on_grid(const GridDescriptor& g, cplx fill = 0.0) {
        ComplexField f;
        f.grid = g;
        f.points.resize(g.size());
        for (std::size_t idx = 0; idx < g.size(); ++idx) f.points[idx] = g.node(idx);
        f.values.assign(g.size(), fill);
        f.weights.assign(g.size(), g.h * g.h * g.h);
        return f;
    }

    template <class Fn>
    static ComplexField sample(const GridDescriptor& g, Fn&& fn) {
        auto f = on_grid(g);
        for (std::size_t idx = 0; idx < f.size(); ++idx) f.values[idx] = fn(f.points[idx]);
        return f;
    }

    /// Point cloud with unit weights.
    static ComplexField cloud(std::vector<Vec3> pts, std::vector<cplx> vals = {}) {
        ComplexField f;
        f.points = std::move(pts);
        if (vals.empty()) vals.assign(f.points.size(), 0.0);
        f.values = std::move(vals);
        f.weights.assign(f.points.size(), 1.0);
        f.validate();
        return f;
    }

    bool is_valid_sample(std::size_t idx) const {
        if (!grid || grid->margin == 0) return true;
        const auto c = grid->ijk(idx);
        return grid->valid(c[0], c[1], c[2]);
    }

    void validate() const {
        if (points.size() != values.size() || points.size() != weights.size())
            throw ShapeError("field points, values and weights differ in length");
        for (double w : weights)
            if (!(w > 0.0)) throw ShapeError("field weights must be positive");
        if (grid) {
            if (grid->size() != points.size()) throw ShapeError("grid descriptor does not match sample count");
            for (std::size_t idx = 0; idx < points.size(); ++idx)
                if (!(points[idx] == grid->node(idx))) throw ShapeError("grid points out of lexicographic order");
        }
    }

    ComplexField& operator+=(const ComplexField& o) {
        require_same(o);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }
    ComplexField& operator-=(const ComplexField& o) {
        require_same(o);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    ComplexField& operator*=(cplx c) {
        for (auto& v : values) v *= c;
        return *this;
    }

private:
    void require_same(const ComplexField& o) const {
        if (o.values.size() != values.size()) throw ShapeError("fields differ in sample count");
    }
};

inline ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
inline ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
inline ComplexField operator*(cplx c, ComplexField a) { return a *= c; }

/// Constant orders of the weighted L^2 norm
///   || r^{-l} (r + h)^{l - alpha} <r>^{s + alpha} f ||.
struct WeightOrders {
    double s = 0.0;
    double ell = 0.0;
    double alpha = 0.0;
    double h = 1.0;

    void validate() const {
        if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("weight parameter h must be positive");
    }
    bool plain() const { return s == 0.0 && ell == 0.0 && alpha == 0.0; }
};

/// Distance to the nearest center; distance to the origin when there are none.
inline double marked_distance(const Vec3& x, const std::vector<Vec3>& centers) {
    if (centers.empty()) return norm(x);
    double r = distance(x, centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) r = std::min(r, distance(x, centers[c]));
    return r;
}

inline std::vector<Vec3> center_positions(const ChargeConfiguration& cfg) {
    std::vector<Vec3> out;
    for (const auto& c : cfg.charges()) out.push_back(c.pos);
    return out;
}

inline double plain_l2_norm(const ComplexField& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.is_valid_sample(i)) acc += f.weights[i] * std::norm(f.values[i]);
    return std::sqrt(acc);
}

inline double weighted_l2_norm(const ComplexField& f, const WeightOrders& w, const std::vector<Vec3>& centers) {
    w.validate();
    if (w.plain()) return plain_l2_norm(f);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f.is_valid_sample(i)) continue;
        const double r = marked_distance(f.points[i], centers);
        if (r == 0.0 && w.ell > 0.0) throw SingularWeightError("sample at a marked point with positive b-order");
        const double weight = std::pow(r, -w.ell) * std::pow(r + w.h, w.ell - w.alpha) *
                              std::pow(std::sqrt(1.0 + r * r), w.s + w.alpha);
        acc += f.weights[i] * std::norm(weight * f.values[i]);
    }
    return std::sqrt(acc);
}

// ---------------------------------------------------------------------------

inline constexpr double resolution_limit = 0.5;

/// P f = -Lap f + V f - sigma^2 f by the 7-point stencil. The output has one
/// more invalid layer than the input; invalid nodes hold zero.
inline ComplexField apply_P(const ComplexField& f, const ChargeConfiguration& cfg, double sigma) {
    if (!f.grid) throw ShapeError("apply_P needs a field on a uniform grid");
    const auto& g = *f.grid;
    if (!(std::abs(sigma) * g.h < resolution_limit))
        throw ResolutionError("grid spacing too coarse for sigma (need sigma*h < 0.5)");
    ComplexField out = f;
    out.grid->margin = g.margin + 1;
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double s2 = sigma * sigma;
    const std::size_t si = static_cast<std::size_t>(g.n[1]) * g.n[2], sj = g.n[2];
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const std::size_t idx = g.index(i, j, k);
                if (!out.grid->valid(i, j, k)) {
                    out.values[idx] = 0.0;
                    continue;
                }
                const cplx* v = f.values.data();
                const cplx lap = (v[idx + si] + v[idx - si] + v[idx + sj] + v[idx - sj] + v[idx + 1] +
                                  v[idx - 1] - 6.0 * v[idx]) *
                                 inv_h2;
                const double V = cfg.empty() ? 0.0 : evaluate_potential(cfg, f.points[idx]);
                out.values[idx] = -lap + (V - s2) * v[idx];
            }
    return out;
}

// ---------------------------------------------------------------------------

/// Circular cone around `axis` (apex at the origin) and shell thickness for
/// decay fits.
struct ConeSpec {
    Vec3 axis{1.0, 0.0, 0.0};
    double half_angle_deg = 15.0;
    double shell_rel_width = 0.05;

    bool contains(const Vec3& x) const {
        const double r = norm(x), a = norm(axis);
        if (r == 0.0) return false;
        const double c = dot(x, axis) / (r * a);
        return c >= std::cos(half_angle_deg * pi / 180.0) - 1e-15;
    }
};

/// Deterministic sample points on the shell |x| = R inside the cone:
/// `n_rings` polar rings (including the axis) with up to `n_phi` points each.
inline std::vector<Vec3> cone_shell_points(const ConeSpec& cone, double R, int n_rings = 6, int n_phi = 12) {
    const Vec3 e = cone.axis / norm(cone.axis);
    // orthonormal frame around e
    const Vec3 t = std::abs(e.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 u = t - dot(t, e) * e;
    u = u / norm(u);
    const Vec3 w{e.y * u.z - e.z * u.y, e.z * u.x - e.x * u.z, e.x * u.y - e.y * u.x};
    const double theta_max = cone.half_angle_deg * pi / 180.0;
    std::vector<Vec3> pts{R * e};
    for (int ring = 1; ring < n_rings; ++ring) {
        const double th = theta_max * ring / (n_rings - 1);
        for (int q = 0; q < n_phi; ++q) {
            const double ph = 2.0 * pi * q / n_phi;
            pts.push_back(R * (std::cos(th) * e + std::sin(th) * (std::cos(ph) * u + std::sin(ph) * w)));
        }
    }
    return pts;
}

/// Logarithmically spaced radii r0 * q^k.
inline std::vector<double> log_radii(double r0, double r1, int count) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k)
        out.push_back(count == 1 ? r0 : r0 * std::pow(r1 / r0, double(k) / (count - 1)));
    return out;
}

struct DecayFit {
    double exponent = 0.0;
    double confidence = 0.0;  // coefficient of determination of the log-log fit
    std::vector<double> radii;
    std::vector<double> amplitudes;
};

struct LineFit {
    double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

/// Fit max-amplitude-per-shell ~ r^{-exponent} inside the cone.
inline DecayFit decay_exponent(const ComplexField& f, const ConeSpec& cone, const std::vector<double>& radii) {
    if (radii.size() < 3) throw SamplingError("decay fit needs at least three radii");
    DecayFit out;
    std::vector<double> lx, ly;
    for (double R : radii) {
        double amp = -1.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (!f.is_valid_sample(i)) continue;
            const double r = norm(f.points[i]);
            if (std::abs(r - R) > cone.shell_rel_width * R || !cone.contains(f.points[i])) continue;
            amp = std::max(amp, std::abs(f.values[i]));
        }
        if (amp < 0.0) throw SamplingError("no samples in the cone shell at r = " + std::to_string(R));
        if (!(amp > 0.0)) throw SamplingError("zero amplitude on the cone shell at r = " + std::to_string(R));
        out.radii.push_back(R);
        out.amplitudes.push_back(amp);
        lx.push_back(std::log(R));
        ly.push_back(std::log(amp));
    }
    const auto fit = least_squares_line(lx, ly);
    out.exponent = -fit.slope;
    out.confidence = fit.r_squared;
    return out;
}

// ---------------------------------------------------------------------------

/// Linear interpolation of grid values at an arbitrary interior point.
inline cplx trilinear(const ComplexField& f, const Vec3& x) {
    const auto& g = *f.grid;
    const Vec3 u = (x - g.origin) / g.h;
    std::array<int, 3> base;
    std::array<double, 3> frac;
    for (int d = 0; d < 3; ++d) {
        base[d] = std::clamp(static_cast<int>(std::floor(u[d])), 0, g.n[d] - 2);
        frac[d] = u[d] - base[d];
    }
    cplx acc = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const double wgt = (a ? frac[0] : 1 - frac[0]) * (b ? frac[1] : 1 - frac[1]) * (c ? frac[2] : 1 - frac[2]);
                acc += wgt * f.values[g.index(base[0] + a, base[1] + b, base[2] + c)];
            }
    return acc;
}

struct HardyResult {
    double lhs = 0.0;  // ||f / r||
    double rhs = 0.0;  // 2 ||grad f||
};

/// Hardy pair for a compactly supported grid field. The 1/r^2 sum carries the
/// lattice correction for the singular point, so the center may sit anywhere.
inline HardyResult hardy_check(const ComplexField& f, const Vec3& center, int calibration_levels = 3) {
    if (!f.grid) throw ShapeError("hardy check needs a grid field");
    const auto& g = *f.grid;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const bool edge = i == 0 || j == 0 || k == 0 || i == g.n[0] - 1 || j == g.n[1] - 1 || k == g.n[2] - 1;
                if (edge && f.values[g.index(i, j, k)] != cplx(0.0))
                    throw SupportError("field does not vanish on the grid boundary");
            }
    const double h3 = g.h * g.h * g.h;
    double lhs2 = 0.0, grad2 = 0.0;
    auto at = [&](int i, int j, int k) -> cplx {
        if (i < 0 || j < 0 || k < 0 || i >= g.n[0] || j >= g.n[1] || k >= g.n[2]) return 0.0;
        return f.values[g.index(i, j, k)];
    };
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const cplx v = at(i, j, k);
                const double r2 = dot(g.node(i, j, k) - center, g.node(i, j, k) - center);
                if (r2 > 1e-24 * g.h * g.h) lhs2 += h3 * std::norm(v) / r2;
                const cplx dx = (at(i + 1, j, k) - at(i - 1, j, k)) / (2.0 * g.h);
                const cplx dy = (at(i, j + 1, k) - at(i, j - 1, k)) / (2.0 * g.h);
                const cplx dz = (at(i, j, k + 1) - at(i, j, k - 1)) / (2.0 * g.h);
                grad2 += h3 * (std::norm(dx) + std::norm(dy) + std::norm(dz));
            }
    const Vec3 u = (center - g.origin) / g.h;
    const bool inside = u.x >= 0 && u.y >= 0 && u.z >= 0 && u.x <= g.n[0] - 1 && u.y <= g.n[1] - 1 && u.z <= g.n[2] - 1;
    if (inside) {
        const double c2 = lattice_singular_constant(2, lattice_offset(u), calibration_levels);
        lhs2 += c2 * g.h * std::norm(trilinear(f, center));
    }
    return {std::sqrt(std::max(lhs2, 0.0)), 2.0 * std::sqrt(grad2)};
}

}  // namespace bscat
