#pragma once

// Born sequence B_0 = R_0, B_{j+1} = -R_0 M_V B_j and its convergence
// diagnostics.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bscat/field.hpp"
#include "bscat/potential.hpp"
#include "bscat/resolvent.hpp"

namespace bscat {

/// Born recursion on one grid at one sigma. Holds the kernel transform and
/// the sampled potential so consecutive terms reuse them.
class BornSolver {
public:
    BornSolver(const GridDescriptor& g, double sigma, const ChargeConfiguration& cfg, const QuadratureSpec& q)
        : q_(q), cfg_(cfg), R_(g, sigma, q.singular_refinement_depth),
          pot_(PotentialOnGrid::build(g, cfg, q.singular_refinement_depth)) {
        q.validate();
        detail::check_resolution(g, sigma, q);
    }

    double sigma() const { return R_.sigma(); }
    const GridDescriptor& grid() const { return R_.grid(); }
    const PotentialOnGrid& potential() const { return pot_; }

    ComplexField first(const ComplexField& f) {
        check_tail(f.values, "source");
        return R_.apply(f);
    }

    /// -R_0 (V b)
    ComplexField next(const ComplexField& b) {
        if (cfg_.empty()) return ComplexField::on_grid(grid());
        std::vector<cplx> vb(b.size());
        for (std::size_t i = 0; i < vb.size(); ++i) vb[i] = pot_.V[i] * b.values[i];
        check_tail(vb, "potential times Born term");
        auto out = R_.apply_potential(b, pot_);
        out *= -1.0;
        return out;
    }

    /// B_0 f, ..., B_J f
    std::vector<ComplexField> terms(const ComplexField& f, int J) {
        if (J < 0) throw ParameterError("Born order must be nonnegative");
        std::vector<ComplexField> out;
        out.push_back(first(f));
        for (int j = 1; j <= J; ++j) out.push_back(next(out.back()));
        return out;
    }

private:
    void check_tail(const std::vector<cplx>& s, const char* what) const {
        const double t = tail_estimate(grid(), s);
        if (t > q_.tol)
            throw TruncationError(std::string(what) + " has relative tail " + std::to_string(t) +
                                  " beyond r_max (tol " + std::to_string(q_.tol) + ")");
    }

    QuadratureSpec q_;
    ChargeConfiguration cfg_;
    FreeResolventGrid R_;
    PotentialOnGrid pot_;
};

inline void require_grid_source(const ComplexField& f) {
    if (!f.grid) throw ShapeError("Born terms need a source on a uniform grid");
}

inline ComplexField born_term(const ComplexField& f, int j, double sigma, const ChargeConfiguration& cfg,
                              const QuadratureSpec& q) {
    require_grid_source(f);
    BornSolver solver(*f.grid, sigma, cfg, q);
    return solver.terms(f, j).back();
}

inline ComplexField born_partial_sum(const ComplexField& f, int J, double sigma, const ChargeConfiguration& cfg,
                                     const QuadratureSpec& q) {
    require_grid_source(f);
    BornSolver solver(*f.grid, sigma, cfg, q);
    auto t = solver.terms(f, J);
    ComplexField sum = t[0];
    for (std::size_t j = 1; j < t.size(); ++j) sum += t[j];
    return sum;
}

// ---------------------------------------------------------------------------

/// Source family used by the convergence experiments:
/// f(x) = e^{i sigma k * d . x} exp(-|x - x0|^2 / width^2) with unit direction d.
/// k = 0 gives a sigma-independent Gaussian.
struct SourceSpec {
    Vec3 center;
    double width = 0.4;
    Vec3 direction{1.0, 0.0, 0.0};
    double k = 1.0;

    cplx operator()(const Vec3& x, double sigma) const {
        const Vec3 d = direction / norm(direction);
        const Vec3 y = x - center;
        return std::exp(cplx{-dot(y, y) / (width * width), sigma * k * dot(d, x)});
    }
    ComplexField sample(const GridDescriptor& g, double sigma) const {
        return ComplexField::sample(g, [&](const Vec3& x) { return (*this)(x, sigma); });
    }
};

struct BornDiagnostics {
    double sigma = 0.0;
    std::vector<double> term_norms;
    std::vector<double> ratios;  // NaN where undefined
    WeightOrders weight_spec;
    double cutoff_radius = 0.0;
    double grid_spacing = 0.0;
    int grid_nodes = 0;
};

struct BornConvergenceReport {
    std::vector<BornDiagnostics> per_sigma;
    double fitted_exponent = std::numeric_limits<double>::quiet_NaN();  // slope of log mean ratio vs log sigma
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> per_order_exponents;  // slope of log ratios[j] vs log sigma
};

/// || chi u ||_w with the bump cutoff of radius rho about the origin.
inline double cutoff_norm(const ComplexField& u, double rho, const WeightOrders& w, const std::vector<Vec3>& centers) {
    ComplexField c = u;
    for (std::size_t i = 0; i < c.size(); ++i) c.values[i] *= bump(norm(c.points[i]), rho);
    return weighted_l2_norm(c, w, centers);
}

inline BornDiagnostics born_diagnostics(const std::vector<ComplexField>& terms, double sigma, const WeightOrders& w,
                                        double chi_radius, const ChargeConfiguration& cfg) {
    BornDiagnostics d;
    d.sigma = sigma;
    d.weight_spec = w;
    d.cutoff_radius = chi_radius;
    if (!terms.empty() && terms[0].grid) {
        d.grid_spacing = terms[0].grid->h;
        d.grid_nodes = terms[0].grid->n[0];
    }
    const auto centers = center_positions(cfg);
    for (const auto& t : terms) d.term_norms.push_back(cutoff_norm(t, chi_radius, w, centers));
    for (std::size_t j = 0; j + 1 < d.term_norms.size(); ++j)
        d.ratios.push_back(d.term_norms[j] > 0.0 ? d.term_norms[j + 1] / d.term_norms[j]
                                                 : std::numeric_limits<double>::quiet_NaN());
    return d;
}

/// Fit the sigma-scaling of the ratios. The headline exponent uses the
/// geometric mean of the defined ratios at each sigma.
inline void fit_ratio_exponents(BornConvergenceReport& rep) {
    std::vector<double> ls, lm;
    for (const auto& d : rep.per_sigma) {
        double acc = 0.0;
        int n = 0;
        for (double r : d.ratios)
            if (std::isfinite(r) && r > 0.0) {
                acc += std::log(r);
                ++n;
            }
        if (n == 0) continue;
        ls.push_back(std::log(d.sigma));
        lm.push_back(acc / n);
    }
    if (ls.size() >= 2) {
        const auto fit = least_squares_line(ls, lm);
        rep.fitted_exponent = fit.slope;
        rep.r_squared = fit.r_squared;
    }
    const std::size_t J = rep.per_sigma.empty() ? 0 : rep.per_sigma[0].ratios.size();
    for (std::size_t j = 0; j < J; ++j) {
        std::vector<double> x, y;
        for (const auto& d : rep.per_sigma)
            if (j < d.ratios.size() && std::isfinite(d.ratios[j]) && d.ratios[j] > 0.0) {
                x.push_back(std::log(d.sigma));
                y.push_back(std::log(d.ratios[j]));
            }
        rep.per_order_exponents.push_back(x.size() >= 2 ? least_squares_line(x, y).slope
                                                        : std::numeric_limits<double>::quiet_NaN());
    }
}

/// Term norms of chi B_j f for j <= J at each sigma, then the cross-sigma fit.
/// Grids follow q.grid(sigma); the weight parameter h is set to 1/sigma.
inline BornConvergenceReport convergence_report(const SourceSpec& src, int J, const std::vector<double>& sigmas,
                                                const ChargeConfiguration& cfg, const QuadratureSpec& q,
                                                WeightOrders w, double chi_radius) {
    if (sigmas.size() < 3) throw ParameterError("convergence report needs at least three sigma values");
    const auto [lo, hi] = std::minmax_element(sigmas.begin(), sigmas.end());
    if (!(*hi >= 4.0 * *lo)) throw ParameterError("sigma values must span a factor of at least 4");
    BornConvergenceReport rep;
    for (double sigma : sigmas) {
        const auto g = q.grid(sigma);
        BornSolver solver(g, sigma, cfg, q);
        const auto terms = solver.terms(src.sample(g, sigma), J);
        w.h = 1.0 / std::abs(sigma);
        rep.per_sigma.push_back(born_diagnostics(terms, sigma, w, chi_radius, cfg));
    }
    fit_ratio_exponents(rep);
    return rep;
}

}  // namespace bscat
