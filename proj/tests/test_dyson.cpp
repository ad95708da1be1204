#include "catch_amalgamated.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "bscat/dyson.hpp"
#include "bscat/experiments.hpp"

using namespace bscat;
using Catch::Approx;

namespace {

const ChargeConfiguration screened_one(std::vector<PointCharge>{{1.0, {0.05, 0.03, -0.02}}}, 2.0);

double rel_diff(const SpacetimeField& a, const SpacetimeField& b) {
    double e = 0.0, n = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        e += std::norm(a.values[i] - b.values[i]);
        n += std::norm(b.values[i]);
    }
    return std::sqrt(e / n);
}

// Gaussian in time, compactly supported bump of radius w in space.
struct BumpPulse {
    double t_center = 0.5, tau = 0.1, w = 0.25, omega = 0.0;
    cplx operator()(double t, const Vec3& x) const {
        const double r2 = dot(x, x) / (w * w);
        if (r2 >= 1.0) return 0.0;
        const double s = (t - t_center) / tau;
        return std::pow(1.0 - r2, 4) * std::exp(cplx{-s * s, omega * t});
    }
};

SpacetimeField small_pulse(double h = 0.1, int steps = 48, double t_max = 3.0) {
    const auto g = GridDescriptor::cube({0, 0, 0}, 0.6, h);
    PulseSpec p;
    p.t_center = 0.8;
    p.tau = 0.15;
    p.width = 0.2;
    return p.sample(g, t_max, steps);
}

SpacetimeField tones(const std::vector<std::pair<int, cplx>>& bins, int T = 128, double dt = 0.05) {
    const auto g = GridDescriptor::cube({0, 0, 0}, 0.1, 0.1);
    return SpacetimeField::sample(g, 0.0, dt, T, [&](double t, const Vec3& x) {
        cplx acc = 0.0;
        for (const auto& [k, c] : bins) acc += c * (1.0 + x.x) * std::exp(cplx{0.0, 2.0 * pi * k * t / (T * dt)});
        return acc;
    });
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

const cli::Outputs& reference_run() {
    static const cli::Outputs out = [] {
        cli::Outputs o;
        cli::run_dyson_duality(cli::parse_config_text(slurp(BSCAT_CONFIGS "/dyson_duality.json")), o);
        return o;
    }();
    return out;
}

}  // namespace

TEST_CASE("retarded potential of zero is zero", "[dyson]") {
    const auto g = GridDescriptor::cube({0, 0, 0}, 0.3, 0.1);
    const auto f = SpacetimeField::zeros(g, 0.0, 0.1, 16);
    for (const auto& v : retarded_apply(f).values) CHECK(v == 0.0);
    for (const auto& v : retarded_apply_direct(f, {{1.0, {0.5, 0, 0}}, {0.3, {0, 0, 0}}})) CHECK(v == 0.0);
}

TEST_CASE("light cone tracking and causality", "[dyson]") {
    const BumpPulse p;
    const auto g = GridDescriptor::cube({0, 0, 0}, 0.3, 0.05);
    const auto f = SpacetimeField::sample(g, 0.0, 0.02, 151, p);

    // peak of |G_0 f| along a ray at three times
    std::vector<double> times{1.5, 2.0, 2.5}, peaks;
    for (double t : times) {
        std::vector<SpacetimePoint> tg;
        for (double r = 0.4; r <= 3.0; r += 0.005) tg.push_back({t, {r, 0.0, 0.0}});
        const auto u = retarded_apply_direct(f, tg);
        std::size_t best = 0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (std::abs(u[i]) > std::abs(u[best])) best = i;
        peaks.push_back(tg[best].x.x);
    }
    const double speed = (peaks[2] - peaks[0]) / (times[2] - times[0]);
    CHECK(speed == Approx(1.0).margin(0.05));
    CHECK(peaks[1] == Approx(2.0 - p.t_center).margin(0.05));

    // every retarded time lies before t_center - 5 tau
    std::vector<SpacetimePoint> early, all;
    for (double t = 0.5; t <= 3.0; t += 0.25)
        for (double r = 0.4; r <= 3.5; r += 0.1) {
            const SpacetimePoint pt{t, {0.0, r, 0.0}};
            all.push_back(pt);
            if (t < r - p.w + p.t_center - 5.0 * p.tau) early.push_back(pt);
        }
    REQUIRE(early.size() > 20);
    double peak = 0.0;
    for (const auto& v : retarded_apply_direct(f, all)) peak = std::max(peak, std::abs(v));
    for (const auto& v : retarded_apply_direct(f, early)) CHECK(std::abs(v) <= 1e-6 * peak);

    CHECK_THROWS_AS(retarded_apply_direct(f, {{3.5, {1, 0, 0}}}), SupportError);
    const auto loud = SpacetimeField::sample(g, 0.0, 0.02, 16, [](double, const Vec3&) { return cplx(1.0); });
    CHECK_THROWS_AS(retarded_apply(loud), SupportError);
}

TEST_CASE("grid and direct retarded paths agree on nodes", "[dyson]") {
    const auto f = small_pulse();
    const auto grid = retarded_apply(f);
    std::vector<SpacetimePoint> tg;
    std::vector<std::pair<int, std::size_t>> at;
    for (int k : {10, 25, 47})
        for (std::size_t i = 0; i < f.spatial_size(); i += 97) {
            tg.push_back({f.time(k), f.grid.node(i)});
            at.push_back({k, i});
        }
    const auto got = retarded_apply_direct(f, tg);
    double scale = 0.0;
    for (const auto& v : grid.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - grid.at(at[i].first, at[i].second)) < 1e-10 * scale);

    // with the potential
    const auto pot = PotentialOnGrid::build(f.grid, screened_one, 3);
    RetardedGrid G(f.grid, f.dt, f.steps);
    const auto gv = G.apply_potential(grid, pot);
    const auto dv = retarded_apply_direct(grid, tg, 3, &pot);
    double vs = 0.0;
    for (const auto& v : gv.values) vs = std::max(vs, std::abs(v));
    for (std::size_t i = 0; i < dv.size(); ++i) CHECK(std::abs(dv[i] - gv.at(at[i].first, at[i].second)) < 1e-10 * vs);
}

TEST_CASE("Dyson term examples", "[dyson]") {
    const auto f = small_pulse();
    const auto r0 = retarded_apply(f);
    CHECK(rel_diff(dyson_term(f, 0, screened_one), r0) < 1e-14);
    for (int j : {1, 2})
        for (const auto& v : dyson_term(f, j, ChargeConfiguration{}).values) CHECK(v == 0.0);
    CHECK_THROWS_AS(DysonSolver(f.grid, f.dt, f.steps, screened_one).terms(f, -1), ParameterError);
}

TEST_CASE("Dyson terms scale as c^j", "[dyson][property]") {
    const auto f = small_pulse();
    DysonSolver base(f.grid, f.dt, f.steps, screened_one);
    const auto t = base.terms(f, 3);
    for (double c : {0.5, 2.0, -1.0}) {
        DysonSolver s(f.grid, f.dt, f.steps, screened_one.scaled(c));
        const auto ts = s.terms(f, 3);
        for (int j = 0; j <= 3; ++j) {
            auto expect = t[j];
            expect *= std::pow(c, j);
            CHECK(rel_diff(ts[j], expect) < 1e-10);
        }
    }
}

TEST_CASE("time-translation covariance", "[dyson][property]") {
    const auto g = GridDescriptor::cube({0, 0, 0}, 0.6, 0.1);
    const double dt = 3.0 / 47;
    PulseSpec p;
    p.t_center = 0.8;
    p.tau = 0.15;
    p.width = 0.2;
    const auto f = SpacetimeField::sample(g, 0.0, dt, 64, p);
    for (int m : {3, 7}) {
        PulseSpec q = p;
        q.t_center += m * dt;
        // same envelope, phase e^{i omega m dt} from the carrier
        auto fs = SpacetimeField::sample(g, 0.0, dt, 64, q);
        fs *= std::exp(cplx{0.0, -p.omega * m * dt});
        for (int j : {0, 1, 2}) {
            const auto a = dyson_term(f, j, screened_one);
            const auto b = dyson_term(fs, j, screened_one);
            double e = 0.0, n = 0.0;
            for (int k = 0; k + m < 64; ++k)
                for (std::size_t i = 0; i < g.size(); ++i) {
                    e = std::max(e, std::abs(b.at(k + m, i) - a.at(k, i)));
                    n = std::max(n, std::abs(a.at(k, i)));
                }
            INFO("shift " << m << " j " << j);
            CHECK(e <= 1e-8 * n);
        }
    }
}

TEST_CASE("high-frequency cutoff examples", "[dyson]") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    auto u = tones({{0, 1.0}});
    for (auto& v : u.values) v = cplx(N(rng), N(rng));

    // Sigma = 0 is the identity
    CHECK(rel_diff(highfreq_cutoff(u, 0.0), u) < 1e-12);
    CHECK(rel_diff(highfreq_cutoff(u, 0.0, CutoffEdge::sharp), u) < 1e-12);

    // bin-aligned tones: above Sigma kept, below annihilated
    const int T = 128;
    const double dt = 0.05, Sigma = 20.0;
    const int kc = static_cast<int>(Sigma * T * dt / (2 * pi));  // last bin below Sigma
    const auto hi = tones({{kc + 3, 1.0}, {-(kc + 5), cplx(0.5, 1.0)}});
    const auto lo = tones({{kc - 3, 1.0}, {-(kc - 2), 2.0}, {0, 1.0}});
    CHECK(rel_diff(highfreq_cutoff(hi, Sigma), hi) < 1e-12);
    for (const auto& v : highfreq_cutoff(lo, Sigma).values) CHECK(std::abs(v) < 1e-12);

    // sharp and raised-cosine edges agree on tones at least 10% from Sigma
    int swept = 0;
    for (int k = -T / 2 + 1; k < T / 2; ++k) {
        const double s = dft_frequency((k + T) % T, T, dt);
        if (std::abs(std::abs(s) - Sigma) < 0.1 * Sigma) continue;
        const auto w = tones({{k, 1.0}});
        const auto a = highfreq_cutoff(w, Sigma, CutoffEdge::sharp);
        const auto b = highfreq_cutoff(w, Sigma, CutoffEdge::raised_cosine);
        double e = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) e = std::max(e, std::abs(a.values[i] - b.values[i]));
        CHECK(e < 1e-12);
        ++swept;
    }
    CHECK(swept > 100);

    CHECK_THROWS_AS(highfreq_cutoff(u, pi / dt), ResolutionError);
    CHECK_THROWS_AS(highfreq_cutoff(u, 70.0), ResolutionError);
    CHECK_THROWS_AS(highfreq_cutoff(u, -1.0), ParameterError);
    CHECK_THROWS_AS(highfreq_cutoff(u, 5.0, CutoffEdge::raised_cosine, 1.0), ParameterError);
}

TEST_CASE("sharp cutoff is a projection", "[dyson][property]") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    auto u = tones({{0, 1.0}}, 100, 0.07);
    for (auto& v : u.values) v = cplx(N(rng), N(rng));
    for (double Sigma : {3.0, 10.0, 30.0}) {
        const auto once = highfreq_cutoff(u, Sigma, CutoffEdge::sharp);
        const auto twice = highfreq_cutoff(once, Sigma, CutoffEdge::sharp);
        CHECK(rel_diff(twice, once) < 1e-12);
        // orthogonal: |P u|^2 + |u - P u|^2 = |u|^2
        auto rest = u;
        for (std::size_t i = 0; i < rest.values.size(); ++i) rest.values[i] -= once.values[i];
        CHECK(std::pow(l2_norm(once), 2) + std::pow(l2_norm(rest), 2) == Approx(std::pow(l2_norm(u), 2)).epsilon(1e-12));
    }
}

TEST_CASE("low band equals the direct band-limited sum", "[dyson][property]") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> N;
    const int T = 90;
    const double dt = 0.04, Sigma = 25.0;
    auto u = tones({{0, 1.0}}, T, dt);
    for (auto& v : u.values) v = cplx(N(rng), N(rng));
    const auto hi = highfreq_cutoff(u, Sigma, CutoffEdge::sharp);
    double e = 0.0, n = 0.0;
    for (std::size_t i = 0; i < u.spatial_size(); ++i)
        for (int t = 0; t < T; ++t) {
            // (1/T) sum_{|sigma_k| < Sigma} e^{i sigma_k t} sum_m u_m e^{-i sigma_k m}, without an FFT
            cplx low = 0.0;
            for (int k = 0; k < T; ++k) {
                if (std::abs(dft_frequency(k, T, dt)) >= Sigma) continue;
                cplx hat = 0.0;
                for (int m = 0; m < T; ++m) hat += u.at(m, i) * std::exp(cplx{0.0, -2.0 * pi * k * m / T});
                low += hat * std::exp(cplx{0.0, 2.0 * pi * k * t / T}) / double(T);
            }
            e = std::max(e, std::abs(u.at(t, i) - hi.at(t, i) - low));
            n = std::max(n, std::abs(u.at(t, i)));
        }
    CHECK(e < 1e-12 * n);
}

TEST_CASE("Fourier duality", "[dyson]") {
    QuadratureSpec q;
    q.r_max = 0.6;
    q.max_spacing = 0.1;
    q.tol = 10.0;
    const auto f = small_pulse(0.1, 64, 5.0);

    // free potential: both sides of every j >= 1 identity vanish
    const auto free = fourier_duality_check(f, 1, {8.0}, ChargeConfiguration{}, q);
    CHECK(free.rel_discrepancy[0] == 0.0);

    const auto rep = fourier_duality_check(f, 0, {6.0, 10.0}, screened_one, q);
    REQUIRE(rep.sigma.size() == 2);
    CHECK(rep.time_steps == 64);
    for (double d : rep.rel_discrepancy) CHECK(d <= 5e-2);

    CHECK_THROWS_AS(fourier_duality_check(f, 0, {50.0}, screened_one, q), ResolutionError);
}

TEST_CASE("reference duality run", "[dyson][golden]") {
    const auto rows = parse_csv(*reference_run().find("dyson_duality.csv"));
    // (time_steps, j, sigma) -> discrepancy
    auto find = [&](int steps, int j, double s) {
        for (const auto& r : rows)
            if (r[0] == steps && r[1] == j && r[2] == s) return r[3];
        FAIL("missing row");
        return 0.0;
    };
    for (double s : {8.0, 12.0}) {
        CHECK(find(64, 0, s) <= 5e-2);
        CHECK(find(64, 1, s) <= 7e-2);
        CHECK(find(128, 1, s) < find(64, 1, s));
        CHECK(find(128, 0, s) < find(64, 0, s));
    }
}

TEST_CASE("later Dyson terms carry less high-band energy", "[dyson]") {
    const auto rows = parse_csv(*reference_run().find("dyson_highband.csv"));
    REQUIRE(rows.size() >= 3);
    CHECK(rows[2][2] < rows[0][2]);
    // the cutoff never adds energy
    for (const auto& r : rows) CHECK(r[4] <= r[3]);
}
