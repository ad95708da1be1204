#pragma once

// Experiment runner: JSON configs, the registry of named experiments, and
// the manifest written next to their outputs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bscat/born.hpp"
#include "bscat/dyson.hpp"
#include "bscat/field.hpp"
#include "bscat/io.hpp"
#include "bscat/planewave.hpp"
#include "bscat/potential.hpp"
#include "bscat/resolvent.hpp"
#include "bscat/specfun.hpp"

namespace bscat::cli {

using json = nlohmann::json;

inline constexpr const char* version = "1.0.0";

// ---------------------------------------------------------------------------
// Field-checked JSON access. Every error names the dotted path of the value.

namespace detail {

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(join(path, it.key()) + ": unknown key");
    }
}

inline double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path + ": must be finite");
    return x;
}

inline double positive(const json& v, const std::string& path) {
    const double x = number(v, path);
    if (!(x > 0.0)) throw ConfigError(path + ": must be positive");
    return x;
}

inline int integer(const json& v, const std::string& path, int lo, int hi) {
    if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
        throw ConfigError(path + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
}

inline bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
    return v.get<bool>();
}

inline Vec3 vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(path + ": expected an array of three numbers");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
}

inline std::vector<double> numbers(const json& v, const std::string& path, bool nonempty = true) {
    if (!v.is_array()) throw ConfigError(path + ": expected an array of numbers");
    if (nonempty && v.empty()) throw ConfigError(path + ": must not be empty");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<double> positive_numbers(const json& v, const std::string& path) {
    auto out = numbers(v, path);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!(out[i] > 0.0)) throw ConfigError(path + "[" + std::to_string(i) + "]: must be positive");
    return out;
}

/// Optional member lookup: nullptr when absent.
inline const json* member(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline ChargeConfiguration charges(const json& v, const std::string& path) {
    const json* list = &v;
    std::string lpath = path;
    double gamma = 0.0;
    if (v.is_object()) {
        only_keys(v, path, {"screening", "centers"});
        if (auto s = member(v, "screening")) {
            gamma = number(*s, path + ".screening");
            if (gamma < 0.0) throw ConfigError(path + ".screening: must be nonnegative");
        }
        list = member(v, "centers");
        lpath = path + ".centers";
        if (!list) throw ConfigError(lpath + ": missing");
    }
    if (!list->is_array()) throw ConfigError(lpath + ": expected an array of {Z, pos} objects");
    std::vector<PointCharge> cs;
    for (std::size_t i = 0; i < list->size(); ++i) {
        const std::string p = lpath + "[" + std::to_string(i) + "]";
        const json& c = (*list)[i];
        only_keys(c, p, {"Z", "pos"});
        const json* Z = member(c, "Z");
        const json* pos = member(c, "pos");
        if (!Z) throw ConfigError(p + ".Z: missing");
        if (!pos) throw ConfigError(p + ".pos: missing");
        cs.push_back({number(*Z, p + ".Z"), vec3(*pos, p + ".pos")});
        if (cs.back().Z == 0.0) throw ConfigError(p + ".Z: must be nonzero");
    }
    try {
        return ChargeConfiguration(std::move(cs), gamma);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline ConeSpec cone(const json& v, const std::string& path, ConeSpec base) {
    only_keys(v, path, {"axis", "half_angle_deg", "shell_rel_width"});
    if (auto a = member(v, "axis")) base.axis = vec3(*a, path + ".axis");
    if (norm(base.axis) == 0.0) throw ConfigError(path + ".axis: must be nonzero");
    if (auto a = member(v, "half_angle_deg")) base.half_angle_deg = positive(*a, path + ".half_angle_deg");
    if (!(base.half_angle_deg < 90.0)) throw ConfigError(path + ".half_angle_deg: must be below 90");
    if (auto a = member(v, "shell_rel_width")) base.shell_rel_width = positive(*a, path + ".shell_rel_width");
    return base;
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct AnsatzBlock {
    AnsatzKind kind = AnsatzKind::short_range;
    std::optional<double> r_on;
    double cone_inner = 0.5;
    double cone_outer = 1.0;
};

struct DysonBlock {
    double t_max = 5.0;
    int time_steps = 64;
    double Sigma = 0.0;  // high-frequency threshold
};

struct ExperimentConfig {
    std::string experiment;
    std::optional<ChargeConfiguration> charges;
    std::vector<double> sigma;
    QuadratureSpec quadrature;
    WeightOrders weights{0.0, 1.0, 1.0, 1.0};
    std::optional<AnsatzBlock> ansatz;
    std::optional<DysonBlock> dyson;
    std::string output_dir = "results";
    std::uint64_t seed = 0;
    json params = json::object();
    json raw;  // the parsed document, for hashing

    /// SHA-256 of the canonical (key-sorted, compact) dump.
    std::string hash() const { return io::sha256_hex(raw.dump()); }

    const ChargeConfiguration& cfg() const { return *charges; }

    AnsatzCase ansatz_case(double s) const {
        auto c = AnsatzCase::make(ansatz->kind, s, *charges, ansatz->r_on);
        c.cone_inner = ansatz->cone_inner;
        c.cone_outer = ansatz->cone_outer;
        c.validate();
        return c;
    }
};

inline ExperimentConfig parse_config(const json& doc) {
    using namespace detail;
    only_keys(doc, "", {"experiment", "charges", "sigma", "quadrature", "weights", "ansatz", "dyson", "output_dir",
                        "seed", "params"});
    ExperimentConfig c;
    c.raw = doc;
    const json* e = member(doc, "experiment");
    if (!e) throw ConfigError("experiment: missing");
    if (!e->is_string()) throw ConfigError("experiment: expected a string");
    c.experiment = e->get<std::string>();

    if (auto v = member(doc, "charges")) c.charges = charges(*v, "charges");
    if (auto v = member(doc, "sigma")) {
        c.sigma = numbers(*v, "sigma");
        for (std::size_t i = 0; i < c.sigma.size(); ++i)
            if (c.sigma[i] == 0.0) throw ConfigError("sigma[" + std::to_string(i) + "]: must be nonzero");
    }
    if (auto v = member(doc, "quadrature")) {
        only_keys(*v, "quadrature", {"r_max", "base_resolution", "singular_refinement_depth", "tol", "max_spacing"});
        auto& q = c.quadrature;
        if (auto x = member(*v, "r_max")) q.r_max = positive(*x, "quadrature.r_max");
        if (auto x = member(*v, "base_resolution")) q.base_resolution = positive(*x, "quadrature.base_resolution");
        if (auto x = member(*v, "singular_refinement_depth"))
            q.singular_refinement_depth = integer(*x, "quadrature.singular_refinement_depth", 1, 6);
        if (auto x = member(*v, "tol")) q.tol = positive(*x, "quadrature.tol");
        if (auto x = member(*v, "max_spacing")) q.max_spacing = number(*x, "quadrature.max_spacing");
        q.validate();
    }
    if (auto v = member(doc, "weights")) {
        only_keys(*v, "weights", {"s", "ell", "alpha"});
        if (auto x = member(*v, "s")) c.weights.s = number(*x, "weights.s");
        if (auto x = member(*v, "ell")) c.weights.ell = number(*x, "weights.ell");
        if (auto x = member(*v, "alpha")) c.weights.alpha = number(*x, "weights.alpha");
    }
    if (auto v = member(doc, "ansatz")) {
        only_keys(*v, "ansatz", {"kind", "r_on", "cone_inner", "cone_outer"});
        AnsatzBlock a;
        const json* k = member(*v, "kind");
        if (!k) throw ConfigError("ansatz.kind: missing");
        if (!k->is_string()) throw ConfigError("ansatz.kind: expected a string");
        try {
            a.kind = parse_ansatz_kind(k->get<std::string>());
        } catch (const ConfigError& err) {
            throw ConfigError(std::string("ansatz.kind: ") + err.what());
        }
        if (auto x = member(*v, "r_on")) a.r_on = positive(*x, "ansatz.r_on");
        if (auto x = member(*v, "cone_inner")) a.cone_inner = positive(*x, "ansatz.cone_inner");
        if (auto x = member(*v, "cone_outer")) a.cone_outer = positive(*x, "ansatz.cone_outer");
        if (!(a.cone_inner < a.cone_outer)) throw ConfigError("ansatz.cone_inner: must be below ansatz.cone_outer");
        c.ansatz = a;
    }
    if (auto v = member(doc, "dyson")) {
        only_keys(*v, "dyson", {"t_max", "time_steps", "Sigma"});
        DysonBlock d;
        if (auto x = member(*v, "t_max")) d.t_max = positive(*x, "dyson.t_max");
        if (auto x = member(*v, "time_steps")) d.time_steps = integer(*x, "dyson.time_steps", 8, 1 << 16);
        if (auto x = member(*v, "Sigma")) {
            d.Sigma = number(*x, "dyson.Sigma");
            if (d.Sigma < 0.0) throw ConfigError("dyson.Sigma: must be nonnegative");
        }
        c.dyson = d;
    }
    if (auto v = member(doc, "output_dir")) {
        if (!v->is_string() || v->get<std::string>().empty()) throw ConfigError("output_dir: expected a nonempty string");
        c.output_dir = v->get<std::string>();
    }
    if (auto v = member(doc, "seed")) {
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
            throw ConfigError("seed: expected a nonnegative integer");
        c.seed = v->get<std::uint64_t>();
    }
    if (auto v = member(doc, "params")) {
        if (!v->is_object()) throw ConfigError("params: expected an object");
        c.params = *v;
    }
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Outputs are held in memory until the experiment finishes, so a failure
// leaves nothing behind.

class Outputs {
public:
    void add(const std::string& name, std::string bytes) { files_.emplace_back(name, std::move(bytes)); }
    void add_json(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }
    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
    const std::string* find(const std::string& name) const {
        for (const auto& [n, b] : files_)
            if (n == name) return &b;
        return nullptr;
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

namespace detail {

inline json fit_json(const DecayFit& f) {
    return {{"exponent", f.exponent}, {"confidence", f.confidence}, {"radii", f.radii}, {"amplitudes", f.amplitudes}};
}

inline json grid_json(const GridDescriptor& g) {
    return {{"nodes", g.n[0]}, {"spacing", g.h}, {"origin", {g.origin.x, g.origin.y, g.origin.z}}};
}

inline const ConeSpec backward_cone{{-1.0, 0.0, 0.0}, 15.0, 0.05};
inline const std::vector<double> far_radii{20.0, 40.0, 80.0, 160.0};

}  // namespace detail

// ---------------------------------------------------------------------------
// born-convergence

struct BornParams {
    int J = 3;
    double chi_radius = 1.0;
    SourceSpec source;

    static BornParams parse(const json& p) {
        using namespace detail;
        only_keys(p, "params", {"J", "chi_radius", "source"});
        BornParams b;
        if (auto v = member(p, "J")) b.J = integer(*v, "params.J", 1, 8);
        if (auto v = member(p, "chi_radius")) b.chi_radius = positive(*v, "params.chi_radius");
        if (auto s = member(p, "source")) {
            only_keys(*s, "params.source", {"center", "width", "direction", "k"});
            if (auto v = member(*s, "center")) b.source.center = vec3(*v, "params.source.center");
            if (auto v = member(*s, "width")) b.source.width = positive(*v, "params.source.width");
            if (auto v = member(*s, "direction")) b.source.direction = vec3(*v, "params.source.direction");
            if (norm(b.source.direction) == 0.0) throw ConfigError("params.source.direction: must be nonzero");
            if (auto v = member(*s, "k")) b.source.k = number(*v, "params.source.k");
        }
        return b;
    }
};

inline void run_born_convergence(const ExperimentConfig& c, Outputs& out) {
    const auto p = BornParams::parse(c.params);
    const auto rep =
        convergence_report(p.source, p.J, c.sigma, c.cfg(), c.quadrature, c.weights, p.chi_radius);
    io::CsvTable t({"sigma", "j", "term_norm", "ratio"});
    json per_sigma = json::array();
    for (const auto& d : rep.per_sigma) {
        for (std::size_t j = 0; j < d.term_norms.size(); ++j)
            t.add({d.sigma, static_cast<int>(j), d.term_norms[j],
                   j == 0 ? std::numeric_limits<double>::quiet_NaN() : d.ratios[j - 1]});
        per_sigma.push_back({{"sigma", d.sigma},
                             {"grid_nodes", d.grid_nodes},
                             {"grid_spacing", d.grid_spacing},
                             {"ratios", d.ratios}});
    }
    out.add("born_convergence.csv", t.str());
    out.add_json("summary.json", {{"fitted_exponent", rep.fitted_exponent},
                                  {"r_squared", rep.r_squared},
                                  {"per_order_exponents", rep.per_order_exponents},
                                  {"per_sigma", per_sigma},
                                  {"cutoff_radius", p.chi_radius},
                                  {"weights", {{"s", c.weights.s}, {"ell", c.weights.ell}, {"alpha", c.weights.alpha}}},
                                  {"config_hash", c.hash()}});
}

// ---------------------------------------------------------------------------
// resolvent-scaling

struct ResolventParams {
    double chi_radius = 1.0;
    int trials = 8;
    int iterations = 12;

    static ResolventParams parse(const json& p) {
        using namespace detail;
        only_keys(p, "params", {"chi_radius", "trials", "iterations"});
        ResolventParams r;
        if (auto v = member(p, "chi_radius")) r.chi_radius = positive(*v, "params.chi_radius");
        if (auto v = member(p, "trials")) r.trials = integer(*v, "params.trials", 8, 256);
        if (auto v = member(p, "iterations")) r.iterations = integer(*v, "params.iterations", 1, 200);
        return r;
    }
};

inline void run_resolvent_scaling(const ExperimentConfig& c, Outputs& out) {
    const auto p = ResolventParams::parse(c.params);
    if (c.sigma.size() < 2) throw ConfigError("sigma: resolvent scaling needs at least two values");
    io::CsvTable t({"sigma", "probe_norm", "min", "max", "trials"});
    json probes = json::array();
    std::vector<double> ls, ln;
    for (std::size_t i = 0; i < c.sigma.size(); ++i) {
        // one seed per sigma, derived from the config seed
        const auto rep = resolvent_norm_probe(c.sigma[i], p.chi_radius, c.quadrature, p.trials,
                                              c.seed + 7919 * static_cast<std::uint64_t>(i), p.iterations);
        t.add({rep.sigma, rep.probe_norm, rep.min, rep.max, rep.trials});
        probes.push_back({{"sigma", rep.sigma}, {"seed", rep.seed}, {"values", rep.values}});
        ls.push_back(std::log(std::abs(rep.sigma)));
        ln.push_back(std::log(rep.probe_norm));
    }
    const auto fit = least_squares_line(ls, ln);
    out.add("resolvent_scaling.csv", t.str());
    out.add_json("probes.json", probes);
    out.add_json("summary.json", {{"slope", fit.slope},
                                  {"r_squared", fit.r_squared},
                                  {"chi_radius", p.chi_radius},
                                  {"config_hash", c.hash()}});
}

// ---------------------------------------------------------------------------
// coulomb-wave

struct CoulombParams {
    std::vector<std::pair<double, double>> cases{{1.0, 5.0}, {-1.0, 10.0}};  // (Z, sigma)
    std::vector<double> radii = detail::far_radii;
    ConeSpec cone = detail::backward_cone;
    std::vector<double> source_radii = detail::far_radii;
    ConeSpec source_cone{{0.3, -1.0, 0.5}, 15.0, 0.05};

    static CoulombParams parse(const json& p) {
        using namespace detail;
        only_keys(p, "params", {"cases", "radii", "cone", "source_radii", "source_cone"});
        CoulombParams r;
        if (auto v = member(p, "cases")) {
            if (!v->is_array() || v->empty()) throw ConfigError("params.cases: expected a nonempty array");
            r.cases.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                const std::string path = "params.cases[" + std::to_string(i) + "]";
                only_keys((*v)[i], path, {"Z", "sigma"});
                const json* Z = member((*v)[i], "Z");
                const json* s = member((*v)[i], "sigma");
                if (!Z) throw ConfigError(path + ".Z: missing");
                if (!s) throw ConfigError(path + ".sigma: missing");
                const double sig = number(*s, path + ".sigma");
                if (sig == 0.0) throw ConfigError(path + ".sigma: must be nonzero");
                r.cases.emplace_back(number(*Z, path + ".Z"), sig);
            }
        }
        if (auto v = member(p, "radii")) r.radii = positive_numbers(*v, "params.radii");
        if (auto v = member(p, "cone")) r.cone = detail::cone(*v, "params.cone", r.cone);
        if (auto v = member(p, "source_radii")) r.source_radii = positive_numbers(*v, "params.source_radii");
        if (auto v = member(p, "source_cone")) r.source_cone = detail::cone(*v, "params.source_cone", r.source_cone);
        return r;
    }
};

inline void run_coulomb_wave(const ExperimentConfig& c, Outputs& out) {
    const auto p = CoulombParams::parse(c.params);
    io::CsvTable t({"Z", "sigma", "radius", "remainder", "control"});
    json cases = json::array();
    for (const auto& [Z, s] : p.cases) {
        const auto chk = asymptotic_phase_check(Z, s, p.radii, p.cone);
        for (std::size_t i = 0; i < chk.radii.size(); ++i)
            t.add({Z, s, chk.radii[i], chk.amplitudes[i], chk.control_amplitudes[i]});
        cases.push_back({{"Z", Z},
                         {"sigma", s},
                         {"exponent", chk.exponent},
                         {"confidence", chk.confidence},
                         {"control_exponent", chk.control_exponent},
                         {"remainder_vanishes", chk.remainder_vanishes}});
    }
    out.add("coulomb_wave.csv", t.str());
    json summary{{"cases", cases}, {"config_hash", c.hash()}};

    // Source gain for a recentred charged cluster, when one is configured.
    if (c.charges) {
        if (c.sigma.empty()) throw ConfigError("sigma: the Coulomb source comparison needs a sigma value");
        const double s = c.sigma.front();
        const auto ac = AnsatzCase::make(AnsatzKind::coulomb, s, c.cfg(), c.ansatz ? c.ansatz->r_on : std::nullopt);
        std::vector<Vec3> pts;
        for (double R : p.source_radii)
            for (const auto& q : cone_shell_points(p.source_cone, R)) pts.push_back(q);
        const auto cloud = ComplexField::cloud(pts);
        const auto f0 = ansatz_source(ac, cloud);
        const auto naive = plane_wave_source(ac, cloud);
        const auto fit = decay_exponent(f0, p.source_cone, p.source_radii);
        const auto nfit = decay_exponent(naive, p.source_cone, p.source_radii);
        io::CsvTable st({"radius", "ansatz_source", "plane_wave_source"});
        for (std::size_t i = 0; i < fit.radii.size(); ++i) st.add({fit.radii[i], fit.amplitudes[i], nfit.amplitudes[i]});
        out.add("coulomb_source.csv", st.str());
        summary["source"] = {{"sigma", s}, {"ansatz", detail::fit_json(fit)}, {"plane_wave", detail::fit_json(nfit)}};
    }
    out.add_json("summary.json", summary);
}

// ---------------------------------------------------------------------------
// dipole-ansatz

struct DipoleParams {
    std::vector<double> radii = detail::far_radii;
    ConeSpec cone = detail::backward_cone;
    std::vector<Vec3> probe_points{{0.0, 1.0, 0.0}, {-2.0, 0.5, 0.3}, {1.5, -0.7, 0.4},
                                   {-3.0, 0.2, -1.1}, {0.4, 2.0, -0.5}, {-0.8, -0.3, 0.9}};

    static DipoleParams parse(const json& p) {
        using namespace detail;
        only_keys(p, "params", {"radii", "cone", "probe_points"});
        DipoleParams r;
        if (auto v = member(p, "radii")) r.radii = positive_numbers(*v, "params.radii");
        if (auto v = member(p, "cone")) r.cone = detail::cone(*v, "params.cone", r.cone);
        if (auto v = member(p, "probe_points")) {
            if (!v->is_array() || v->empty()) throw ConfigError("params.probe_points: expected a nonempty array");
            r.probe_points.clear();
            for (std::size_t i = 0; i < v->size(); ++i)
                r.probe_points.push_back(vec3((*v)[i], "params.probe_points[" + std::to_string(i) + "]"));
        }
        return r;
    }
};

inline void run_dipole_ansatz(const ExperimentConfig& c, Outputs& out) {
    const auto p = DipoleParams::parse(c.params);
    const double s = c.sigma.front();
    auto ac = c.ansatz ? c.ansatz_case(s) : AnsatzCase::make(AnsatzKind::dipole, s, c.cfg());
    if (ac.kind != AnsatzKind::dipole) throw ConfigError("ansatz.kind: dipole-ansatz needs kind dipole");
    std::vector<Vec3> pts;
    for (double R : p.radii)
        for (const auto& q : cone_shell_points(p.cone, R)) pts.push_back(q);
    const auto cloud = ComplexField::cloud(pts);
    const auto f1 = ansatz_source(ac, cloud);
    const auto f0 = plane_wave_source(ac, cloud);
    const auto fit1 = decay_exponent(f1, p.cone, p.radii);
    const auto fit0 = decay_exponent(f0, p.cone, p.radii);
    io::CsvTable t({"radius", "corrected_source", "plane_wave_source"});
    for (std::size_t i = 0; i < fit1.radii.size(); ++i) t.add({fit1.radii[i], fit1.amplitudes[i], fit0.amplitudes[i]});
    out.add("dipole_ansatz.csv", t.str());

    // v at probe points: closed form against the defining integral, and the
    // x-derivative against -x.a/r^3.
    const Vec3 a = ac.moments.dipole;
    io::CsvTable vt({"x", "y", "z", "v", "v_integral", "dx_fd", "dx_identity"});
    double worst_closed = 0.0, worst_dx = 0.0;
    for (const auto& q : p.probe_points) {
        const double v = dipole_v(q, a);
        const double vi = dipole_v_integral(q, a);
        const double hx = 1e-4 * std::max(1.0, norm(q));
        const double dfd = (dipole_v(q + Vec3{hx, 0, 0}, a) - dipole_v(q - Vec3{hx, 0, 0}, a)) / (2.0 * hx);
        const double r = norm(q);
        const double ident = -dot(q, a) / (r * r * r);
        vt.add({q.x, q.y, q.z, v, vi, dfd, ident});
        worst_closed = std::max(worst_closed, std::abs(v - vi));
        worst_dx = std::max(worst_dx, std::abs(dfd - ident));
    }
    out.add("dipole_v.csv", vt.str());
    out.add_json("summary.json", {{"sigma", s},
                                  {"corrected", detail::fit_json(fit1)},
                                  {"plane_wave", detail::fit_json(fit0)},
                                  {"closed_vs_integral_max_abs", worst_closed},
                                  {"dx_identity_max_abs", worst_dx},
                                  {"config_hash", c.hash()}});
}

// ---------------------------------------------------------------------------
// planewave-residual

struct PlanewaveParams {
    int J = 3;
    double interior_inner = 0.1;
    double interior_outer_frac = 0.8;  // of r_max
    double shell_inner = 0.4, shell_outer = 0.8;
    std::optional<double> fd_spacing;

    static PlanewaveParams parse(const json& p) {
        using namespace detail;
        only_keys(p, "params", {"J", "interior_inner", "interior_outer_frac", "shell", "fd_spacing"});
        PlanewaveParams r;
        if (auto v = member(p, "J")) r.J = integer(*v, "params.J", 0, 8);
        if (auto v = member(p, "interior_inner")) r.interior_inner = number(*v, "params.interior_inner");
        if (auto v = member(p, "interior_outer_frac")) r.interior_outer_frac = positive(*v, "params.interior_outer_frac");
        if (auto v = member(p, "shell")) {
            const auto s = positive_numbers(*v, "params.shell");
            if (s.size() != 2 || !(s[0] < s[1])) throw ConfigError("params.shell: expected [inner, outer] with inner < outer");
            r.shell_inner = s[0];
            r.shell_outer = s[1];
        }
        if (auto v = member(p, "fd_spacing")) r.fd_spacing = positive(*v, "params.fd_spacing");
        return r;
    }
};

/// A single charge at the origin has the exact Coulomb wave as reference.
inline bool single_center_at_origin(const ChargeConfiguration& cfg) {
    return cfg.size() == 1 && cfg.charges()[0].pos == Vec3{} && cfg.screening_rate() == 0.0;
}

inline void run_planewave_residual(const ExperimentConfig& c, Outputs& out) {
    const auto p = PlanewaveParams::parse(c.params);
    io::CsvTable t({"sigma", "J", "residual", "exact_rel_error", "term_norm"});
    json rows = json::array();
    for (double s : c.sigma) {
        const auto ac = c.ansatz_case(s);
        const auto g = c.quadrature.grid(s);
        const auto like = ComplexField::on_grid(g);
        auto u = build_ansatz(ac, like);
        const auto f = ansatz_source(ac, like, p.fd_spacing);
        BornSolver solver(g, s, c.cfg(), c.quadrature);
        const auto terms = solver.terms(f, p.J);

        const bool exact = ac.kind == AnsatzKind::coulomb && single_center_at_origin(c.cfg());
        ComplexField uex;
        if (exact) {
            CoulombWave wave(ac.moments.total_charge, s, 2.0 * c.quadrature.r_max);
            uex = ComplexField::sample(g, [&](const Vec3& x) { return x == Vec3{} ? cplx(0.0) : wave(x); });
        }
        const double r_out = p.interior_outer_frac * c.quadrature.r_max;
        auto masked = [](ComplexField v, double r0, double r1) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double r = norm(v.points[i]);
                if (r < r0 || r > r1) v.values[i] = 0.0;
            }
            return v;
        };
        for (int J = 0; J <= p.J; ++J) {
            u -= terms[J];
            const double res = plain_l2_norm(masked(apply_P(u, c.cfg(), s), p.interior_inner, r_out));
            double err = std::numeric_limits<double>::quiet_NaN();
            if (exact)
                err = plain_l2_norm(masked(u - uex, p.shell_inner, p.shell_outer)) /
                      plain_l2_norm(masked(uex, p.shell_inner, p.shell_outer));
            t.add({s, J, res, err, plain_l2_norm(terms[J])});
        }
        rows.push_back({{"sigma", s}, {"grid", detail::grid_json(g)}, {"exact_reference", exact}});
    }
    out.add("planewave_residual.csv", t.str());
    out.add_json("summary.json", {{"runs", rows}, {"config_hash", c.hash()}});
}

// ---------------------------------------------------------------------------
// dyson-duality

struct DysonParams {
    int J = 1;
    PulseSpec pulse;
    bool refine = true;
    bool write_field = false;

    static DysonParams parse(const json& p) {
        using namespace detail;
        only_keys(p, "params", {"J", "pulse", "refine", "write_field"});
        DysonParams r;
        if (auto v = member(p, "J")) r.J = integer(*v, "params.J", 0, 4);
        if (auto s = member(p, "pulse")) {
            only_keys(*s, "params.pulse", {"omega", "t_center", "tau", "center", "width"});
            if (auto v = member(*s, "omega")) r.pulse.omega = number(*v, "params.pulse.omega");
            if (auto v = member(*s, "t_center")) r.pulse.t_center = number(*v, "params.pulse.t_center");
            if (auto v = member(*s, "tau")) r.pulse.tau = positive(*v, "params.pulse.tau");
            if (auto v = member(*s, "center")) r.pulse.center = vec3(*v, "params.pulse.center");
            if (auto v = member(*s, "width")) r.pulse.width = positive(*v, "params.pulse.width");
        }
        if (auto v = member(p, "refine")) r.refine = boolean(*v, "params.refine");
        if (auto v = member(p, "write_field")) r.write_field = boolean(*v, "params.write_field");
        return r;
    }
};

inline void run_dyson_duality(const ExperimentConfig& c, Outputs& out) {
    const auto p = DysonParams::parse(c.params);
    const auto& d = *c.dyson;
    const double smax = std::abs(*std::max_element(c.sigma.begin(), c.sigma.end(),
                                                   [](double a, double b) { return std::abs(a) < std::abs(b); }));
    const auto g = c.quadrature.grid(smax);
    io::CsvTable t({"time_steps", "j", "sigma", "rel_discrepancy"});
    json reports = json::array();
    std::vector<int> step_list{d.time_steps};
    if (p.refine) step_list.push_back(2 * d.time_steps);
    for (int steps : step_list) {
        const auto f = p.pulse.sample(g, d.t_max, steps);
        for (int j = 0; j <= p.J; ++j) {
            const auto rep = fourier_duality_check(f, j, c.sigma, c.cfg(), c.quadrature);
            for (std::size_t i = 0; i < rep.sigma.size(); ++i) t.add({steps, j, rep.sigma[i], rep.rel_discrepancy[i]});
            reports.push_back({{"j", rep.j},
                               {"sigma", rep.sigma},
                               {"rel_discrepancy", rep.rel_discrepancy},
                               {"grid", {{"nodes", rep.grid_nodes}, {"spacing", rep.grid_spacing}}},
                               {"time_steps", rep.time_steps},
                               {"dt", rep.dt}});
        }
    }
    out.add("dyson_duality.csv", t.str());
    out.add_json("duality.json", reports);

    // High-band energy per Dyson order, and the cutoff applied once on the left.
    const auto f = p.pulse.sample(g, d.t_max, d.time_steps);
    DysonSolver solver(g, f.dt, f.steps, c.cfg(), c.quadrature.singular_refinement_depth);
    const auto terms = solver.terms(f, std::max(p.J, 2));
    const double Sigma = d.Sigma > 0.0 ? d.Sigma : 0.5 * std::abs(p.pulse.omega);
    io::CsvTable h({"j", "Sigma", "highband_fraction", "term_norm", "cut_norm"});
    for (std::size_t j = 0; j < terms.size(); ++j)
        h.add({static_cast<int>(j), Sigma, highband_fraction(terms[j], Sigma), l2_norm(terms[j]),
               l2_norm(highfreq_cutoff(terms[j], Sigma))});
    out.add("dyson_highband.csv", h.str());
    if (p.write_field) out.add("dyson_term0.bsf4", io::encode_bsf4(terms[0]));
}

// ---------------------------------------------------------------------------
// kummer-verify

struct KummerParams {
    std::vector<double> A{0.25, 0.5, 1.0, 2.0};
    double lambda_max = 100.0;
    int n_a = 21, n_lambda = 401;
    double Z = 1.0, sigma = 5.0;
    int ode_samples = 200;
    double s_min = 0.1, s_max = 50.0;

    static KummerParams parse(const json& p) {
        using namespace detail;
        only_keys(p, "params", {"A", "lambda_max", "n_a", "n_lambda", "Z", "sigma", "ode_samples", "s_range"});
        KummerParams r;
        if (auto v = member(p, "A")) r.A = positive_numbers(*v, "params.A");
        if (auto v = member(p, "lambda_max")) r.lambda_max = positive(*v, "params.lambda_max");
        if (auto v = member(p, "n_a")) r.n_a = integer(*v, "params.n_a", 1, 10000);
        if (auto v = member(p, "n_lambda")) r.n_lambda = integer(*v, "params.n_lambda", 1, 1000000);
        if (auto v = member(p, "Z")) r.Z = number(*v, "params.Z");
        if (auto v = member(p, "sigma")) r.sigma = positive(*v, "params.sigma");
        if (auto v = member(p, "ode_samples")) r.ode_samples = integer(*v, "params.ode_samples", 2, 100000);
        if (auto v = member(p, "s_range")) {
            const auto s = positive_numbers(*v, "params.s_range");
            if (s.size() != 2 || !(s[0] < s[1])) throw ConfigError("params.s_range: expected [min, max] with min < max");
            r.s_min = s[0];
            r.s_max = s[1];
        }
        return r;
    }
};

struct OdeResidual {
    double s = 0.0, residual = 0.0, bound = 0.0;
};

/// v(s) = C M(a, 1, i s sigma), a = iZ/(2 sigma); residual of
/// 2s v'' + 2(1 - i s sigma) v' + Z v with analytic v' and v'' by central
/// differences of v'.
inline OdeResidual kummer_ode_residual(double Z, double sigma, double s) {
    const cplx a{0.0, Z / (2.0 * sigma)};
    const cplx C = coulomb_constant(Z, sigma);
    auto v = [&](double x) { return C * kummer_m(a, x * sigma); };
    auto dv = [&](double x) { return C * I * sigma * kummer_m_dz(a, x * sigma); };
    const double h = 1e-4 * std::max(s, 1.0) / std::max(1.0, sigma);
    const cplx d2 = (dv(s + h) - dv(s - h)) / (2.0 * h);
    const cplx d1 = dv(s), d0 = v(s);
    OdeResidual r;
    r.s = s;
    r.residual = std::abs(2.0 * s * d2 + 2.0 * (1.0 - I * s * sigma) * d1 + Z * d0);
    r.bound = 1e-6 * (std::abs(d0) + std::abs(d1) + std::abs(d2)) * (1.0 + s * sigma);
    return r;
}

/// Parameters for the integral/Maclaurin agreement table: |a| <= 1 inside the
/// strip |Re a| < 1, lambda in +-[1, 30].
inline std::vector<std::pair<cplx, double>> kummer_agreement_grid() {
    std::vector<std::pair<cplx, double>> out;
    const std::vector<cplx> as{{0.0, 0.0},  {0.0, 0.5},  {0.0, -1.0}, {0.0, 1.0},  {0.3, 0.4},
                               {-0.5, 0.5}, {0.7, -0.6}, {0.9, 0.1},  {-0.95, 0.0}, {0.25, -0.9}};
    for (const auto& a : as)
        for (double lam : {1.0, 2.5, 5.0, 9.5, 10.5, 15.0, 20.0, 30.0}) {
            out.emplace_back(a, lam);
            out.emplace_back(a, -lam);
        }
    return out;
}

inline void run_kummer_verify(const ExperimentConfig& c, Outputs& out) {
    const auto p = KummerParams::parse(c.params);
    io::CsvTable sup({"A", "lambda_max", "n_a", "n_lambda", "sup_abs_m"});
    for (double A : p.A) sup.add({A, p.lambda_max, p.n_a, p.n_lambda, kummer_sup_scan(A, p.lambda_max, p.n_a, p.n_lambda)});
    out.add("kummer_sup_scan.csv", sup.str());

    io::CsvTable ode({"s", "residual", "bound", "pass"});
    int passed = 0;
    for (int i = 0; i < p.ode_samples; ++i) {
        const double s = p.s_min * std::pow(p.s_max / p.s_min, double(i) / (p.ode_samples - 1));
        const auto r = kummer_ode_residual(p.Z, p.sigma, s);
        const bool ok = r.residual <= r.bound;
        passed += ok;
        ode.add({r.s, r.residual, r.bound, ok ? 1 : 0});
    }
    out.add("kummer_ode_residual.csv", ode.str());

    io::CsvTable agr({"a_re", "a_im", "lambda", "integral_re", "integral_im", "series_re", "series_im", "rel_diff"});
    double worst = 0.0;
    for (const auto& [a, lam] : kummer_agreement_grid()) {
        const cplx mi = kummer_integral(a, lam);
        const cplx ms = kummer_maclaurin_precise(a, lam);
        const double rel = std::abs(mi - ms) / std::abs(ms);
        worst = std::max(worst, rel);
        agr.add({a.real(), a.imag(), lam, mi.real(), mi.imag(), ms.real(), ms.imag(), rel});
    }
    out.add("kummer_agreement.csv", agr.str());
    out.add_json("summary.json", {{"ode_samples", p.ode_samples},
                                  {"ode_passed", passed},
                                  {"agreement_max_rel", worst},
                                  {"config_hash", c.hash()}});
}

// ---------------------------------------------------------------------------
// hardy-check

struct HardyParams {
    int trials = 20;
    double half_width = 1.2;
    double spacing = 0.03;

    static HardyParams parse(const json& p) {
        using namespace detail;
        only_keys(p, "params", {"trials", "half_width", "spacing"});
        HardyParams r;
        if (auto v = member(p, "trials")) r.trials = integer(*v, "params.trials", 1, 1000);
        if (auto v = member(p, "half_width")) r.half_width = positive(*v, "params.half_width");
        if (auto v = member(p, "spacing")) r.spacing = positive(*v, "params.spacing");
        return r;
    }
};

/// Random smooth bump: a complex amplitude times a modulated bump of random
/// radius about a random center, all inside the ball of radius 0.8 * half_width.
struct HardyTrial {
    Vec3 center;
    double radius = 0.0;
    cplx amplitude;
    Vec3 k;

    cplx operator()(const Vec3& x) const {
        return amplitude * bump(distance(x, center), radius) * std::exp(cplx{0.0, dot(k, x)});
    }
};

inline HardyTrial draw_hardy_trial(std::mt19937_64& rng, double half_width) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto u01 = [&] { return 0.5 * (U(rng) + 1.0); };
    HardyTrial t;
    const double R = 0.8 * half_width;
    t.radius = R * (0.3 + 0.4 * u01());
    const double reach = R - t.radius;
    t.center = {U(rng) * reach / std::sqrt(3.0), U(rng) * reach / std::sqrt(3.0), U(rng) * reach / std::sqrt(3.0)};
    t.amplitude = {U(rng), U(rng)};
    if (t.amplitude == cplx(0.0)) t.amplitude = 1.0;
    t.k = {4.0 * U(rng), 4.0 * U(rng), 4.0 * U(rng)};
    return t;
}

inline void run_hardy_check(const ExperimentConfig& c, Outputs& out) {
    const auto p = HardyParams::parse(c.params);
    std::mt19937_64 rng(c.seed);
    const auto g = GridDescriptor::cube({}, p.half_width, p.spacing);
    io::CsvTable t({"trial", "lhs", "rhs", "ratio"});
    double worst = 0.0;
    for (int i = 0; i < p.trials; ++i) {
        const auto trial = draw_hardy_trial(rng, p.half_width);
        const auto f = ComplexField::sample(g, trial);
        const auto r = hardy_check(f, {}, c.quadrature.singular_refinement_depth);
        t.add({i, r.lhs, r.rhs, r.lhs / r.rhs});
        worst = std::max(worst, r.lhs / r.rhs);
    }
    out.add("hardy_check.csv", t.str());
    out.add_json("summary.json", {{"trials", p.trials}, {"max_ratio", worst}, {"config_hash", c.hash()}});
}

// ---------------------------------------------------------------------------
// Registry

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::vector<std::string> required;  // top-level config blocks
    std::vector<std::string> outputs;
    std::function<void(const ExperimentConfig&)> check_params;
    std::function<void(const ExperimentConfig&, Outputs&)> run;
};

inline const std::vector<ExperimentInfo>& registry() {
    static const std::vector<ExperimentInfo> r = [] {
        auto params = [](auto parse) { return [parse](const ExperimentConfig& c) { parse(c.params); }; };
        std::vector<ExperimentInfo> v{
            {"born-convergence", "Born term norms and ratios across sigma with the fitted sigma-exponent",
             {"charges", "sigma", "quadrature"}, {"born_convergence.csv", "summary.json"},
             params(BornParams::parse), run_born_convergence},
            {"coulomb-wave", "exact Coulomb wave asymptotics on backward-cone shells, optional source-decay comparison",
             {}, {"coulomb_wave.csv", "coulomb_source.csv (with charges)", "summary.json"},
             params(CoulombParams::parse), run_coulomb_wave},
            {"dipole-ansatz", "decay of the dipole-corrected source against the plane-wave source; checks on v",
             {"charges", "sigma"}, {"dipole_ansatz.csv", "dipole_v.csv", "summary.json"},
             params(DipoleParams::parse), run_dipole_ansatz},
            {"dyson-duality", "temporal transform of Dyson terms against Born terms at probe frequencies",
             {"charges", "sigma", "quadrature", "dyson"},
             {"dyson_duality.csv", "duality.json", "dyson_highband.csv", "dyson_term0.bsf4 (optional)"},
             params(DysonParams::parse), run_dyson_duality},
            {"hardy-check", "Hardy inequality on random smooth compactly supported bumps", {},
             {"hardy_check.csv", "summary.json"}, params(HardyParams::parse), run_hardy_check},
            {"kummer-verify", "Kummer function sup scan, ODE residual and integral/series agreement", {},
             {"kummer_sup_scan.csv", "kummer_ode_residual.csv", "kummer_agreement.csv", "summary.json"},
             params(KummerParams::parse), run_kummer_verify},
            {"planewave-residual", "perturbed plane wave: interior residual and exact-wave error against Born order",
             {"charges", "sigma", "quadrature", "ansatz"}, {"planewave_residual.csv", "summary.json"},
             params(PlanewaveParams::parse), run_planewave_residual},
            {"resolvent-scaling", "randomized norm probe of the cut-off free resolvent across sigma",
             {"sigma", "quadrature"}, {"resolvent_scaling.csv", "probes.json", "summary.json"},
             params(ResolventParams::parse), run_resolvent_scaling},
        };
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
        return v;
    }();
    return r;
}

inline const ExperimentInfo& lookup(const std::string& name) {
    for (const auto& e : registry())
        if (e.name == name) return e;
    std::string known;
    for (const auto& e : registry()) known += (known.empty() ? "" : ", ") + e.name;
    throw ConfigError("experiment: unknown name '" + name + "' (known: " + known + ")");
}

inline std::string list_experiments() {
    std::string out;
    for (const auto& e : registry()) {
        out += e.name + "\n    " + e.description + "\n    requires: ";
        std::string req;
        for (const auto& b : e.required) req += (req.empty() ? "" : ", ") + b;
        out += (req.empty() ? std::string("(none)") : req) + "\n    outputs: ";
        std::string outs;
        for (const auto& f : e.outputs) outs += (outs.empty() ? "" : ", ") + f;
        out += outs + "\n";
    }
    return out;
}

/// Everything short of running: known experiment, required blocks present,
/// params well formed.
inline const ExperimentInfo& validate(const ExperimentConfig& c) {
    const auto& e = lookup(c.experiment);
    for (const auto& b : e.required)
        if (!c.raw.contains(b)) throw ConfigError(b + ": missing (required by " + e.name + ")");
    if (c.charges && c.charges->empty() && e.name != "coulomb-wave")
        throw ConfigError("charges: must list at least one center");
    e.check_params(c);
    return e;
}

struct RunResult {
    std::filesystem::path directory;
    std::vector<std::string> files;  // including the manifest
    double wall_seconds = 0.0;
};

/// Run, then write every output atomically followed by manifest.json.
inline RunResult run(const ExperimentConfig& c, const std::filesystem::path& output_dir) {
    const auto& e = validate(c);
    const auto t0 = std::chrono::steady_clock::now();
    Outputs out;
    e.run(c, out);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    RunResult res;
    res.directory = output_dir;
    res.wall_seconds = wall;
    json files = json::array();
    for (const auto& [name, bytes] : out.files()) {
        io::atomic_write(output_dir / name, bytes);
        files.push_back({{"file", name}, {"sha256", io::sha256_hex(bytes)}, {"bytes", bytes.size()}});
        res.files.push_back(name);
    }
    const json manifest{{"experiment", c.experiment},
                        {"config_hash", c.hash()},
                        {"version", version},
                        {"threads", thread_count()},
                        {"wall_time_s", wall},
                        {"files", files}};
    io::atomic_write(output_dir / "manifest.json", manifest.dump(2) + "\n");
    res.files.push_back("manifest.json");
    return res;
}

}  // namespace bscat::cli
