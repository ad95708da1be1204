#pragma once

// Outgoing free resolvent R_0(sigma + i0) with kernel e^{i sigma |x-y|} / (4 pi |x-y|).
//
// Sources live on uniform grids. The volume integral is the trapezoidal sum
// with local corrections: a self weight for the kernel singularity at each
// target node, and one correction per Coulomb center when the source carries
// the 1/r factor of the potential (see lattice.hpp). Grid-to-grid application
// is a Toeplitz convolution evaluated by FFT; arbitrary targets use the same
// weights in a direct sum.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "bscat/core.hpp"
#include "bscat/fft.hpp"
#include "bscat/field.hpp"
#include "bscat/lattice.hpp"
#include "bscat/parallel.hpp"
#include "bscat/potential.hpp"

namespace bscat {

struct QuadratureSpec {
    double r_max = 2.0;             // half-width of the sampled source box
    double base_resolution = 6.0;   // grid points per wavelength 2 pi / sigma
    int singular_refinement_depth = 3;  // calibration levels for the singular weights
    double tol = 1e-2;              // admissible relative L^2 tail beyond r_max
    double max_spacing = 0.0;       // upper bound on the spacing; 0 means r_max / 16

    void validate() const {
        if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ConfigError("quadrature.r_max must be positive");
        if (!(tol > 0.0)) throw ConfigError("quadrature.tol must be positive");
        if (!(base_resolution >= 6.0)) throw ConfigError("quadrature.base_resolution must be at least 6 points per wavelength");
        if (singular_refinement_depth < 1 || singular_refinement_depth > 6)
            throw ConfigError("quadrature.singular_refinement_depth must be in [1, 6]");
        if (max_spacing < 0.0) throw ConfigError("quadrature.max_spacing must be nonnegative");
    }

    double spacing_cap() const { return max_spacing > 0.0 ? max_spacing : r_max / 16.0; }

    double spacing(double sigma) const {
        const double wave = sigma == 0.0 ? spacing_cap() : 2.0 * pi / (std::abs(sigma) * base_resolution);
        return std::min(wave, spacing_cap());
    }

    GridDescriptor grid(double sigma, const Vec3& center = {}) const {
        return GridDescriptor::cube(center, r_max, spacing(sigma));
    }
};

inline cplx free_kernel(const Vec3& x, const Vec3& y, double sigma) {
    const double rho = distance(x, y);
    if (rho == 0.0) throw KernelSingularityError("free kernel evaluated on the diagonal");
    return std::exp(cplx{0.0, sigma * rho}) / (4.0 * pi * rho);
}

namespace detail {

inline cplx kernel_at(double rho, double sigma) { return std::exp(cplx{0.0, sigma * rho}) / (4.0 * pi * rho); }

/// Weight of the target node in its own sum: the corrected 1/rho part plus
/// the i sigma / (4 pi) constant of the kernel expansion.
inline cplx self_weight(double h, double sigma, int levels) {
    const double c1 = lattice_singular_constant(1, {0, 0, 0}, levels);
    return cplx{c1 * h * h, sigma * h * h * h} / (4.0 * pi);
}

inline void check_resolution(const GridDescriptor& g, double sigma, const QuadratureSpec& q) {
    const double limit = 2.0 * pi / q.base_resolution;
    if (std::abs(sigma) * g.h > limit * (1.0 + 1e-9))
        throw ResolutionError("source grid has fewer than base_resolution points per wavelength");
}

}  // namespace detail

/// Potential sampled on a grid together with the per-center data needed for
/// the 1/r corrections.
struct PotentialOnGrid {
    struct Center {
        double Z;
        Vec3 pos;
        double c1;  // C_1 at the center's lattice offset; 0 when outside the grid
    };
    GridDescriptor grid;
    std::vector<double> V;
    std::vector<Center> centers;

    static PotentialOnGrid build(const GridDescriptor& g, const ChargeConfiguration& cfg, int levels) {
        PotentialOnGrid p;
        p.grid = g;
        for (const auto& c : cfg.charges()) {
            const Vec3 u = (c.pos - g.origin) / g.h;
            const Vec3 d = lattice_offset(u);
            if (norm(d) < 1e-9) throw SingularPointError("charge center coincides with a grid node");
            const bool inside = u.x >= 0 && u.y >= 0 && u.z >= 0 && u.x <= g.n[0] - 1 && u.y <= g.n[1] - 1 &&
                                u.z <= g.n[2] - 1;
            p.centers.push_back({c.Z, c.pos, inside ? lattice_singular_constant(1, d, levels) : 0.0});
        }
        p.V.resize(g.size());
        parallel_for(g.size(), [&](std::size_t i) { p.V[i] = evaluate_potential(cfg, g.node(i)); });
        return p;
    }
};

/// Relative L^2 norm of the part of a source lying beyond its box, estimated
/// by extrapolating the two outermost node layers geometrically.
inline double tail_estimate(const GridDescriptor& g, const std::vector<cplx>& s) {
    double outer = 0.0, second = 0.0, total = 0.0;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const double m = std::norm(s[g.index(i, j, k)]);
                total += m;
                const int layer = std::min({i, j, k, g.n[0] - 1 - i, g.n[1] - 1 - j, g.n[2] - 1 - k});
                if (layer == 0) outer += m;
                else if (layer == 1) second += m;
            }
    if (total == 0.0 || outer == 0.0) return 0.0;
    if (outer >= second) return std::numeric_limits<double>::infinity();
    const double q = outer / second;
    return std::sqrt(outer * q / (1.0 - q) / total);
}

/// R_0(sigma + i0) from a grid to itself.
class FreeResolventGrid {
public:
    FreeResolventGrid(const GridDescriptor& g, double sigma, int levels = 3)
        : grid_(g), sigma_(sigma), levels_(levels), self_(detail::self_weight(g.h, sigma, levels)) {
        const double h = g.h, h3 = h * h * h;
        const cplx self = self_;
        conv_ = std::make_unique<ToeplitzConvolution>(
            std::vector<int>{g.n[0], g.n[1], g.n[2]}, [h, h3, sigma, self](const std::vector<int>& m) -> cplx {
                if (m[0] == 0 && m[1] == 0 && m[2] == 0) return self;
                const double rho = h * std::sqrt(double(m[0]) * m[0] + double(m[1]) * m[1] + double(m[2]) * m[2]);
                return h3 * detail::kernel_at(rho, sigma);
            });
    }

    const GridDescriptor& grid() const { return grid_; }
    double sigma() const { return sigma_; }
    cplx self_weight() const { return self_; }

    /// u = R_0 s for source values s on the grid nodes.
    std::vector<cplx> apply(const std::vector<cplx>& s) { return conv_->apply(s); }

    ComplexField apply(const ComplexField& f) {
        require_grid(f);
        auto out = ComplexField::on_grid(grid_);
        out.values = conv_->apply(f.values);
        return out;
    }

    /// u = R_0 (V g). The source V g is singular at every center; each one
    /// contributes -Z C_1 h^2 g(c) K(x - c) on top of the plain sum.
    ComplexField apply_potential(const ComplexField& g, const PotentialOnGrid& pot) {
        require_grid(g);
        std::vector<cplx> s(g.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = pot.V[i] * g.values[i];
        auto out = ComplexField::on_grid(grid_);
        out.values = conv_->apply(s);
        add_center_corrections(out, g, pot);
        return out;
    }

    void add_center_corrections(ComplexField& out, const ComplexField& g, const PotentialOnGrid& pot) const {
        const double h2 = grid_.h * grid_.h;
        for (const auto& c : pot.centers) {
            if (c.c1 == 0.0) continue;
            const cplx amp = -c.Z * c.c1 * h2 * trilinear(g, c.pos);
            if (amp == 0.0) continue;
            parallel_for(out.size(), [&](std::size_t i) {
                out.values[i] += amp * detail::kernel_at(distance(out.points[i], c.pos), sigma_);
            });
        }
    }

private:
    void require_grid(const ComplexField& f) const {
        if (!f.grid || !f.grid->same_lattice(grid_)) throw ShapeError("field is not on the resolvent's grid");
    }

    GridDescriptor grid_;
    double sigma_;
    int levels_;
    cplx self_;
    std::unique_ptr<ToeplitzConvolution> conv_;
};

/// Direct evaluation of R_0 s (or R_0 (V g) when `pot` is given, with s = V g)
/// at arbitrary targets, with the same local corrections as the grid path.
inline ComplexField apply_free_resolvent_direct(const ComplexField& src, double sigma, const std::vector<Vec3>& targets,
                                                int levels = 3, const PotentialOnGrid* pot = nullptr) {
    if (!src.grid) throw ShapeError("direct resolvent needs a grid source");
    const auto& g = *src.grid;
    const double h = g.h, h3 = h * h * h;
    std::vector<cplx> s(src.size());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = pot ? pot->V[j] * src.values[j] : src.values[j];
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < s.size(); ++j)
        if (s[j] != 0.0) support.push_back(j);
    ComplexField s_field = src;
    s_field.values = s;

    const cplx self = detail::self_weight(h, sigma, levels);
    auto out = ComplexField::cloud(targets);
    parallel_for(targets.size(), [&](std::size_t t) {
        const Vec3 x = targets[t];
        const Vec3 u = (x - g.origin) / h;
        const Vec3 d = lattice_offset(u);
        const bool inside = u.x >= 0 && u.y >= 0 && u.z >= 0 && u.x <= g.n[0] - 1 && u.y <= g.n[1] - 1 &&
                            u.z <= g.n[2] - 1;
        const bool on_node = inside && norm(d) < 1e-9;
        cplx acc = 0.0;
        for (std::size_t j : support) {
            const double rho = distance(x, src.points[j]);
            if (rho < 1e-9 * h) continue;
            acc += h3 * detail::kernel_at(rho, sigma) * s[j];
        }
        if (on_node) {
            const auto node = Vec3{std::round(u.x), std::round(u.y), std::round(u.z)};
            acc += self * s[g.index(int(node.x), int(node.y), int(node.z))];
        } else if (inside) {
            const double c1 = lattice_singular_constant(1, d, levels);
            acc += c1 * h * h / (4.0 * pi) * trilinear(s_field, x);
        }
        if (pot) {
            for (const auto& c : pot->centers) {
                if (c.c1 == 0.0) continue;
                const double rho = distance(x, c.pos);
                if (rho == 0.0) throw SingularPointError("resolvent target at a charge center");
                acc += -c.Z * c.c1 * h * h * trilinear(src, c.pos) * detail::kernel_at(rho, sigma);
            }
        }
        out.values[t] = acc;
    });
    return out;
}

/// R_0(sigma + i0) f at `targets`. When the targets are exactly the source
/// grid the FFT path is used; otherwise the direct sum.
inline ComplexField apply_free_resolvent(const ComplexField& f, double sigma, const std::vector<Vec3>& targets,
                                         const QuadratureSpec& q) {
    q.validate();
    if (!f.grid) throw ShapeError("free resolvent needs a source on a uniform grid");
    detail::check_resolution(*f.grid, sigma, q);
    if (tail_estimate(*f.grid, f.values) > q.tol) throw TruncationError("source tail beyond r_max exceeds tolerance");
    bool same = targets.size() == f.size();
    for (std::size_t i = 0; same && i < targets.size(); ++i) same = targets[i] == f.points[i];
    if (same) {
        FreeResolventGrid R(*f.grid, sigma, q.singular_refinement_depth);
        return R.apply(f);
    }
    return apply_free_resolvent_direct(f, sigma, targets, q.singular_refinement_depth);
}

inline ComplexField apply_free_resolvent(const ComplexField& f, double sigma, const QuadratureSpec& q) {
    return apply_free_resolvent(f, sigma, f.points, q);
}

/// Incoming resolvent R_0(sigma - i0) f = conj(R_0(sigma + i0) conj f).
inline ComplexField apply_incoming_resolvent(const ComplexField& f, double sigma, const QuadratureSpec& q) {
    ComplexField c = f;
    for (auto& v : c.values) v = std::conj(v);
    auto out = apply_free_resolvent(c, sigma, q);
    for (auto& v : out.values) v = std::conj(v);
    return out;
}

// ---------------------------------------------------------------------------

/// exp(1 - 1/(1 - (r/rho)^2)) for r < rho, 0 otherwise.
inline double bump(double r, double rho) {
    const double t = r / rho;
    if (t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

struct ProbeReport {
    double sigma = 0.0;
    double probe_norm = 0.0;  // median over trials
    double min = 0.0, max = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;
};

/// Randomized power iteration for || chi R_0(sigma + i0) chi ||_{L^2 -> L^2}.
/// The adjoint uses the conjugate kernel; iterations run on A*A.
inline ProbeReport resolvent_norm_probe(double sigma, double chi_radius, const QuadratureSpec& q, int trials,
                                        std::uint64_t seed, int iterations = 12) {
    if (trials < 8) throw ParameterError("norm probe needs at least 8 trials");
    if (!(chi_radius > 0.0)) throw ParameterError("cutoff radius must be positive");
    q.validate();
    const double h = std::min(q.spacing(sigma), chi_radius / 12.0);
    const auto g = GridDescriptor::cube({}, chi_radius, h);
    FreeResolventGrid R(g, sigma, q.singular_refinement_depth);
    std::vector<double> chi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) chi[i] = bump(norm(g.node(i)), chi_radius);
    const double h3 = g.h * g.h * g.h;
    auto l2 = [&](const std::vector<cplx>& v) {
        double a = 0.0;
        for (const auto& x : v) a += std::norm(x);
        return std::sqrt(a * h3);
    };
    auto A = [&](std::vector<cplx> v) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= chi[i];
        v = R.apply(v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= chi[i];
        return v;
    };
    auto A_adj = [&](std::vector<cplx> v) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(v[i] * chi[i]);
        v = R.apply(v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(v[i]) * chi[i];
        return v;
    };

    ProbeReport rep;
    rep.sigma = sigma;
    rep.trials = trials;
    rep.seed = seed;
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<cplx> v(g.size());
        for (auto& x : v) {
            const double re = normal(rng);
            const double im = normal(rng);
            x = {re, im};
        }
        double est = 0.0;
        for (int it = 0; it < iterations; ++it) {
            const double nv = l2(v);
            for (auto& x : v) x /= nv;
            auto w = A(v);
            est = l2(w);
            v = A_adj(w);
        }
        rep.values.push_back(est);
    }
    auto sorted = rep.values;
    std::sort(sorted.begin(), sorted.end());
    rep.min = sorted.front();
    rep.max = sorted.back();
    rep.probe_norm = trials % 2 ? sorted[trials / 2] : 0.5 * (sorted[trials / 2 - 1] + sorted[trials / 2]);
    return rep;
}

}  // namespace bscat
