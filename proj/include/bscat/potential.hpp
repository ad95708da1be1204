#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bscat/core.hpp"

namespace bscat {

struct PointCharge {
    double Z = 0.0;
    Vec3 pos;
};

/// Finite set of Coulomb (optionally Yukawa-screened) centers.
///
/// V(x) = -sum_n Z_n exp(-gamma |x - x_n|) / |x - x_n|, so positive Z_n is
/// attractive. A single global screening rate gamma >= 0 is supported.
class ChargeConfiguration {
public:
    ChargeConfiguration() = default;

    explicit ChargeConfiguration(std::vector<PointCharge> charges, double screening_rate = 0.0)
        : charges_(std::move(charges)), screening_(screening_rate) {
        if (!(screening_ >= 0.0) || !std::isfinite(screening_))
            throw ConfigError("screening rate must be finite and nonnegative");
        for (std::size_t n = 0; n < charges_.size(); ++n) {
            const auto& c = charges_[n];
            if (!std::isfinite(c.Z) || c.Z == 0.0)
                throw ConfigError("charge " + std::to_string(n) + " must be finite and nonzero");
            if (!std::isfinite(c.pos.x) || !std::isfinite(c.pos.y) || !std::isfinite(c.pos.z))
                throw ConfigError("charge " + std::to_string(n) + " has a non-finite position");
            for (std::size_t m = 0; m < n; ++m)
                if (charges_[m].pos == c.pos)
                    throw ConfigError("charges " + std::to_string(m) + " and " + std::to_string(n) +
                                      " share a position");
        }
    }

    const std::vector<PointCharge>& charges() const { return charges_; }
    double screening_rate() const { return screening_; }
    std::size_t size() const { return charges_.size(); }
    bool empty() const { return charges_.empty(); }

    /// Largest |x_n|; zero for an empty configuration.
    double cluster_radius() const {
        double r = 0.0;
        for (const auto& c : charges_) r = std::max(r, norm(c.pos));
        return r;
    }

    /// Every center moved by x0.
    ChargeConfiguration shifted(const Vec3& x0) const {
        auto moved = charges_;
        for (auto& c : moved) c.pos += x0;
        return ChargeConfiguration(std::move(moved), screening_);
    }

    /// Every charge multiplied by c (c != 0).
    ChargeConfiguration scaled(double c) const {
        auto out = charges_;
        for (auto& q : out) q.Z *= c;
        return ChargeConfiguration(std::move(out), screening_);
    }

    ChargeConfiguration with_screening(double gamma) const {
        return ChargeConfiguration(charges_, gamma);
    }

private:
    std::vector<PointCharge> charges_;
    double screening_ = 0.0;
};

/// Single-center contribution -Z exp(-gamma r)/r.
inline double yukawa_term(double Z, double gamma, double r) {
    return gamma == 0.0 ? -Z / r : -Z * std::exp(-gamma * r) / r;
}

inline double evaluate_potential(const ChargeConfiguration& cfg, const Vec3& x) {
    double v = 0.0;
    for (const auto& c : cfg.charges()) {
        const double r = distance(x, c.pos);
        if (r == 0.0) throw SingularPointError("potential evaluated at a charge center");
        v += yukawa_term(c.Z, cfg.screening_rate(), r);
    }
    return v;
}

struct MultipoleMoments {
    double total_charge = 0.0;
    Vec3 dipole;
    /// Traceless convention Q_jk = sum_n Z_n (3 x_j x_k - |x|^2 delta_jk) / 2,
    /// so the quadrupole tail of -V is x^T Q x / r^5.
    std::array<std::array<double, 3>, 3> quadrupole{};
};

inline MultipoleMoments multipole_moments(const ChargeConfiguration& cfg) {
    MultipoleMoments m;
    for (const auto& c : cfg.charges()) {
        m.total_charge += c.Z;
        m.dipole += c.Z * c.pos;
        const double r2 = dot(c.pos, c.pos);
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                m.quadrupole[j][k] += 0.5 * c.Z * (3.0 * c.pos[j] * c.pos[k] - (j == k ? r2 : 0.0));
    }
    return m;
}

/// Recentre so the dipole moment vanishes (x0 = -a/Z). Configurations with
/// zero total charge are returned unchanged, since their dipole is origin-free.
inline ChargeConfiguration recentred(const ChargeConfiguration& cfg) {
    const auto m = multipole_moments(cfg);
    if (m.total_charge == 0.0) return cfg;
    return cfg.shifted(-m.dipole / m.total_charge);
}

namespace detail {

inline double dipole_tolerance(const ChargeConfiguration& cfg) {
    double scale = 0.0;
    for (const auto& c : cfg.charges()) scale += std::abs(c.Z) * (norm(c.pos) + 1.0);
    return 1e-12 * scale;
}

inline void require_far_field(const ChargeConfiguration& cfg, const Vec3& x) {
    if (cfg.screening_rate() != 0.0)
        throw DomainError("multipole remainder requires an unscreened configuration");
    if (!(norm(x) > cfg.cluster_radius()))
        throw DomainError("multipole remainder evaluated inside the charge cluster");
}

}  // namespace detail

/// -V - Z/r - x.a/r^3: what is left of the potential after the monopole and
/// dipole terms. Decays like r^-3 outside the cluster.
inline double multipole_remainder(const ChargeConfiguration& cfg, const Vec3& x) {
    detail::require_far_field(cfg, x);
    const auto m = multipole_moments(cfg);
    const double r = norm(x);
    return -evaluate_potential(cfg, x) - m.total_charge / r - dot(x, m.dipole) / (r * r * r);
}

/// W = -V - Z/r for a configuration already recentred to a = 0.
inline double farfield_remainder(const ChargeConfiguration& cfg, const Vec3& x) {
    detail::require_far_field(cfg, x);
    const auto m = multipole_moments(cfg);
    if (norm(m.dipole) > detail::dipole_tolerance(cfg))
        throw DomainError("farfield remainder requires a configuration with zero dipole moment");
    return -evaluate_potential(cfg, x) - m.total_charge / norm(x);
}

}  // namespace bscat
