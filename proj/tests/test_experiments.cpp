#include "catch_amalgamated.hpp"

#include <fstream>
#include <sstream>

#include "bscat/experiments.hpp"

using namespace bscat;
namespace fs = std::filesystem;
using cli::json;

namespace {

json load(const std::string& name) {
    std::ifstream in(std::string(BSCAT_CONFIGS) + "/" + name);
    REQUIRE(in);
    return json::parse(in);
}

std::string parse_error(const json& doc) {
    try {
        cli::validate(cli::parse_config(doc));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("bscat_exp_" + name);
    fs::remove_all(d);
    return d;
}

json cheap_hardy() {
    auto doc = load("hardy_check.json");
    doc["params"]["trials"] = 3;
    doc["params"]["spacing"] = 0.06;
    return doc;
}

json cheap_kummer() {
    auto doc = load("kummer_verify.json");
    doc["params"]["n_a"] = 5;
    doc["params"]["n_lambda"] = 51;
    doc["params"]["ode_samples"] = 20;
    return doc;
}

}  // namespace

TEST_CASE("registry contents", "[cli]") {
    const std::vector<std::string> want{"born-convergence",  "coulomb-wave",   "dipole-ansatz",
                                        "dyson-duality",     "hardy-check",    "kummer-verify",
                                        "planewave-residual", "resolvent-scaling"};
    std::vector<std::string> got;
    for (const auto& e : cli::registry()) {
        got.push_back(e.name);
        CHECK_FALSE(e.outputs.empty());
        CHECK_FALSE(e.description.empty());
    }
    CHECK(got == want);
    CHECK(std::is_sorted(got.begin(), got.end()));

    const auto listing = cli::list_experiments();
    std::size_t pos = 0;
    for (const auto& e : cli::registry()) {
        const auto at = listing.find(e.name + "\n", pos);
        REQUIRE(at != std::string::npos);
        pos = at;
        for (const auto& f : e.outputs) CHECK(listing.find(f) != std::string::npos);
    }
}

TEST_CASE("every shipped config validates", "[cli]") {
    for (const auto& entry : fs::directory_iterator(BSCAT_CONFIGS)) {
        if (entry.path().extension() != ".json") continue;
        INFO(entry.path());
        std::ifstream in(entry.path());
        CHECK(parse_error(json::parse(in)) == "");
    }
}

TEST_CASE("config errors name the offending field", "[cli]") {
    auto base = load("born_convergence.json");

    auto d = base;
    d.erase("charges");
    CHECK(parse_error(d).starts_with("charges: missing"));

    d = base;
    d["quadrature"]["r_maxx"] = 1.0;
    CHECK(parse_error(d) == "quadrature.r_maxx: unknown key");

    d = base;
    d["colour"] = "blue";
    CHECK(parse_error(d) == "colour: unknown key");

    d = base;
    d["sigma"][2] = "x";
    CHECK(parse_error(d) == "sigma[2]: expected a number");

    d = base;
    d["sigma"][1] = 0;
    CHECK(parse_error(d) == "sigma[1]: must be nonzero");

    d = base;
    d["quadrature"]["r_max"] = -1;
    CHECK(parse_error(d) == "quadrature.r_max: must be positive");

    d = base;
    d["quadrature"]["singular_refinement_depth"] = 9;
    CHECK(parse_error(d).starts_with("quadrature.singular_refinement_depth: must lie in"));

    d = base;
    d["experiment"] = "born";
    CHECK(parse_error(d).starts_with("experiment: unknown name 'born'"));

    d = base;
    d.erase("experiment");
    CHECK(parse_error(d) == "experiment: missing");

    d = base;
    d["seed"] = -3;
    CHECK(parse_error(d) == "seed: expected a nonnegative integer");

    d = base;
    d["charges"]["centers"] = json::array();
    CHECK(parse_error(d) == "charges: must list at least one center");

    d = base;
    d["params"] = {{"J", 3}, {"unknown", 1}};
    CHECK(parse_error(d) == "params.unknown: unknown key");

    auto dy = load("dyson_duality.json");
    dy["dyson"]["time_steps"] = 4;
    CHECK(parse_error(dy).starts_with("dyson.time_steps: must lie in"));

    CHECK_THROWS_AS(cli::parse_config_text("{ not json"), ConfigError);
    CHECK_THROWS_AS(cli::parse_config_text("[1, 2]"), ConfigError);
}

TEST_CASE("run writes outputs and a hashed manifest", "[cli]") {
    const auto dir = scratch_dir("manifest");
    const auto c = cli::parse_config(cheap_kummer());
    const auto res = cli::run(c, dir);
    CHECK(res.files.back() == "manifest.json");

    const auto manifest = json::parse(io::read_file(dir / "manifest.json"));
    CHECK(manifest["experiment"] == "kummer-verify");
    CHECK(manifest["config_hash"] == c.hash());
    CHECK(manifest["version"] == cli::version);
    CHECK(manifest["wall_time_s"].get<double>() >= 0.0);
    std::vector<std::string> listed;
    for (const auto& f : manifest["files"]) {
        const auto bytes = io::read_file(dir / f["file"].get<std::string>());
        CHECK(f["sha256"] == io::sha256_hex(bytes));
        CHECK(f["bytes"] == bytes.size());
        listed.push_back(f["file"]);
    }
    // every file in the directory other than the manifest is listed
    std::size_t on_disk = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() == "manifest.json") continue;
        ++on_disk;
        CHECK(std::find(listed.begin(), listed.end(), e.path().filename().string()) != listed.end());
    }
    CHECK(on_disk == listed.size());
    for (const char* name : {"kummer_sup_scan.csv", "kummer_ode_residual.csv", "kummer_agreement.csv"})
        CHECK(std::find(listed.begin(), listed.end(), name) != listed.end());

    // the CSV header and full-precision rows
    const auto sup = io::read_file(dir / "kummer_sup_scan.csv");
    CHECK(sup.find('\n') != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("a rejected config writes nothing", "[cli]") {
    const auto dir = scratch_dir("rejected");
    auto d = load("born_convergence.json");
    d.erase("charges");
    CHECK_THROWS_AS(cli::run(cli::parse_config(d), dir), ConfigError);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("outputs are byte-identical across thread counts", "[cli][property]") {
    for (const auto& doc : {cheap_hardy(), cheap_kummer()}) {
        const auto c = cli::parse_config(doc);
        std::vector<cli::Outputs> runs;
        for (int threads : {1, 3}) {
            set_thread_count(threads);
            cli::Outputs out;
            cli::validate(c).run(c, out);
            runs.push_back(std::move(out));
        }
        set_thread_count(0);
        INFO(c.experiment);
        REQUIRE(runs[0].files().size() == runs[1].files().size());
        for (std::size_t i = 0; i < runs[0].files().size(); ++i) {
            CHECK(runs[0].files()[i].first == runs[1].files()[i].first);
            if (runs[0].files()[i].first.ends_with(".csv"))
                CHECK(runs[0].files()[i].second == runs[1].files()[i].second);
        }
    }
}

TEST_CASE("seed changes the random trials", "[cli]") {
    auto a = cheap_hardy();
    auto b = a;
    b["seed"] = 8;
    cli::Outputs oa, ob;
    cli::run_hardy_check(cli::parse_config(a), oa);
    cli::run_hardy_check(cli::parse_config(b), ob);
    CHECK(*oa.find("hardy_check.csv") != *ob.find("hardy_check.csv"));
}
