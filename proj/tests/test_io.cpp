#include "catch_amalgamated.hpp"

#include <random>

#include "bscat/io.hpp"

using namespace bscat;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("bscat_io_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("CSV cells round-trip doubles exactly", "[io]") {
    io::CsvTable t({"a", "b", "c"});
    t.add({0.1, 3, "x"});
    t.add({1.0 / 3.0, std::size_t{7}, -2.5e-300});
    CHECK(t.rows() == 2);
    CHECK(t.str() == "a,b,c\n0.10000000000000001,3,x\n0.33333333333333331,7,-2.5e-300\n");
    CHECK_THROWS_AS(t.add({1.0}), IoError);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = U(rng) * std::pow(10.0, i % 40 - 20);
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.0) == "0");
    CHECK(io::format_double(std::nan("")) == "nan");
}

TEST_CASE("field CSV layout", "[io]") {
    const auto f = ComplexField::cloud({{1, 2, 3}, {0.5, 0, -1}}, {cplx(1, -1), cplx(0.25, 0)});
    CHECK(io::field_csv(f) == "x,y,z,re,im,weight\n1,2,3,1,-1,1\n0.5,0,-1,0.25,0,1\n");
}

TEST_CASE("atomic write replaces whole files", "[io]") {
    const auto dir = scratch_dir("atomic");
    const auto p = dir / "nested" / "out.csv";
    io::atomic_write(p, "first\n");
    CHECK(io::read_file(p) == "first\n");
    io::atomic_write(p, std::string("second\0binary", 13));
    CHECK(io::read_file(p) == std::string("second\0binary", 13));
    CHECK_FALSE(fs::exists(dir / "nested" / "out.csv.tmp"));
    CHECK_THROWS_AS(io::read_file(dir / "missing"), IoError);
    // a regular file where a directory is needed
    io::atomic_write(dir / "plain", "x");
    CHECK_THROWS_AS(io::atomic_write(dir / "plain" / "child", "y"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("SHA-256 test vectors", "[io]") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(io::sha256_hex(std::string(1000000, 'a')) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("BSF1 round trip", "[io]") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> N;
    std::vector<Vec3> pts;
    std::vector<cplx> vals;
    for (int i = 0; i < 50; ++i) {
        pts.push_back({N(rng), N(rng), N(rng)});
        vals.emplace_back(N(rng), N(rng));
    }
    auto f = ComplexField::cloud(pts, vals);
    for (auto& w : f.weights) w = 0.5 + std::abs(N(rng));
    const auto bytes = io::encode_bsf1(f);
    CHECK(bytes.size() == 4 + 8 + 48 * 50);
    const auto g = io::decode_bsf1(bytes);
    CHECK(g.points == f.points);
    CHECK(g.values == f.values);
    CHECK(g.weights == f.weights);

    CHECK_THROWS_AS(io::decode_bsf1(bytes.substr(0, bytes.size() - 1)), IoError);
    CHECK_THROWS_AS(io::decode_bsf1(bytes + "x"), IoError);
    CHECK_THROWS_AS(io::decode_bsf1("BSF4" + bytes.substr(4)), IoError);
    CHECK_THROWS_AS(io::decode_bsf1("BS"), IoError);
}

TEST_CASE("BSF4 round trip", "[io]") {
    const auto g = GridDescriptor::cube({0.1, -0.2, 0.3}, 0.3, 0.1);
    const auto f = SpacetimeField::sample(g, 0.25, 0.125, 9, [](double t, const Vec3& x) {
        return cplx(t * x.x + x.z, std::sin(t) - x.y);
    });
    const auto bytes = io::encode_bsf4(f);
    CHECK(bytes.size() == 4 + 4 * 8 + 6 * 8 + 16 * f.values.size());
    const auto h = io::decode_bsf4(bytes);
    CHECK(h.same_shape(f));
    CHECK(h.grid.origin == f.grid.origin);
    CHECK(h.values == f.values);
    CHECK(io::encode_bsf4(h) == bytes);

    CHECK_THROWS_AS(io::decode_bsf4(bytes.substr(0, bytes.size() - 8)), IoError);
    CHECK_THROWS_AS(io::decode_bsf4(bytes.substr(0, 20)), IoError);
    CHECK_THROWS_AS(io::decode_bsf4(bytes + std::string(16, '\0')), IoError);
    // a header claiming more samples than the payload holds
    auto big = bytes;
    const std::uint64_t steps = 1u << 20;
    std::memcpy(big.data() + 4, &steps, 8);
    CHECK_THROWS_AS(io::decode_bsf4(big), IoError);
}
