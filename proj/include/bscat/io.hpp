#pragma once

// Result files: CSV with full double precision, the BSF1 / BSF4 binary field
// layouts, atomic writes and SHA-256 content hashes.
//
// BSF1 (point field), little-endian:
//   "BSF1" | uint64 count | float64 x[count] y[] z[] re[] im[] weight[]
// BSF4 (spacetime field), little-endian, values t-major:
//   "BSF4" | uint64 steps nx ny nz | float64 t0 dt origin.x origin.y origin.z h
//   | float64 (re, im) pairs for t = 0..steps-1, node index 0..nx*ny*nz-1

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "bscat/dyson.hpp"
#include "bscat/field.hpp"

namespace bscat::io {

static_assert(std::endian::native == std::endian::little, "binary layouts assume a little-endian host");

namespace fs = std::filesystem;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Header plus rows; every cell is either a preformatted string or a double.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    struct Cell {
        std::string text;
        Cell(double v) : text(format_double(v)) {}
        Cell(int v) : text(std::to_string(v)) {}
        Cell(std::size_t v) : text(std::to_string(v)) {}
        Cell(std::string s) : text(std::move(s)) {}
        Cell(const char* s) : text(s) {}
    };

    void add(std::vector<Cell> row) {
        if (row.size() != header_.size()) throw IoError("CSV row width does not match its header");
        std::vector<std::string> r;
        for (auto& c : row) r.push_back(std::move(c.text));
        rows_.push_back(std::move(r));
    }

    std::size_t rows() const { return rows_.size(); }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Write via a sibling temp file and rename, so readers never see a partial file.
inline void atomic_write(const fs::path& path, const std::string& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        os.flush();
        if (!os) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename temp file onto " + path.string());
    }
}

inline std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace detail {

template <class T>
void put(std::string& out, T v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

class Reader {
public:
    explicit Reader(const std::string& b) : b_(b) {}
    template <class T>
    T get() {
        if (pos_ + sizeof(T) > b_.size()) throw IoError("binary field truncated");
        T v;
        std::memcpy(&v, b_.data() + pos_, sizeof v);
        pos_ += sizeof v;
        return v;
    }
    void magic(const char* m) {
        if (b_.size() < 4 || b_.compare(0, 4, m) != 0) throw IoError(std::string("missing ") + m + " magic bytes");
        pos_ = 4;
    }
    bool done() const { return pos_ == b_.size(); }

private:
    const std::string& b_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string field_csv(const ComplexField& f) {
    CsvTable t({"x", "y", "z", "re", "im", "weight"});
    for (std::size_t i = 0; i < f.size(); ++i)
        t.add({f.points[i].x, f.points[i].y, f.points[i].z, f.values[i].real(), f.values[i].imag(), f.weights[i]});
    return t.str();
}

inline std::string encode_bsf1(const ComplexField& f) {
    std::string out = "BSF1";
    detail::put<std::uint64_t>(out, f.size());
    for (int c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < f.size(); ++i) {
            double v = 0.0;
            switch (c) {
                case 0: v = f.points[i].x; break;
                case 1: v = f.points[i].y; break;
                case 2: v = f.points[i].z; break;
                case 3: v = f.values[i].real(); break;
                case 4: v = f.values[i].imag(); break;
                default: v = f.weights[i];
            }
            detail::put(out, v);
        }
    return out;
}

/// Decodes as a point cloud; grid structure is not part of BSF1.
inline ComplexField decode_bsf1(const std::string& bytes) {
    detail::Reader r(bytes);
    r.magic("BSF1");
    const auto n = r.get<std::uint64_t>();
    if (n > bytes.size() / 48) throw IoError("BSF1 count exceeds the payload");
    std::vector<double> cols[6];
    for (auto& c : cols) {
        c.resize(n);
        for (auto& v : c) v = r.get<double>();
    }
    if (!r.done()) throw IoError("trailing bytes after BSF1 payload");
    ComplexField f;
    for (std::size_t i = 0; i < n; ++i) {
        f.points.push_back({cols[0][i], cols[1][i], cols[2][i]});
        f.values.emplace_back(cols[3][i], cols[4][i]);
        f.weights.push_back(cols[5][i]);
    }
    f.validate();
    return f;
}

inline std::string encode_bsf4(const SpacetimeField& f) {
    f.validate();
    std::string out = "BSF4";
    detail::put<std::uint64_t>(out, f.steps);
    for (int d = 0; d < 3; ++d) detail::put<std::uint64_t>(out, f.grid.n[d]);
    for (double v : {f.t0, f.dt, f.grid.origin.x, f.grid.origin.y, f.grid.origin.z, f.grid.h}) detail::put(out, v);
    for (const auto& v : f.values) {
        detail::put(out, v.real());
        detail::put(out, v.imag());
    }
    return out;
}

inline SpacetimeField decode_bsf4(const std::string& bytes) {
    detail::Reader r(bytes);
    r.magic("BSF4");
    const auto steps = r.get<std::uint64_t>();
    std::uint64_t n[3];
    for (auto& v : n) v = r.get<std::uint64_t>();
    const double t0 = r.get<double>(), dt = r.get<double>();
    Vec3 origin;
    origin.x = r.get<double>();
    origin.y = r.get<double>();
    origin.z = r.get<double>();
    const double h = r.get<double>();
    const std::uint64_t total = steps * n[0] * n[1] * n[2];
    if (steps > (1u << 24) || n[0] > (1u << 12) || n[1] > (1u << 12) || n[2] > (1u << 12) || total > bytes.size() / 16)
        throw IoError("BSF4 header inconsistent with the payload");
    GridDescriptor g;
    g.origin = origin;
    g.h = h;
    g.n = {int(n[0]), int(n[1]), int(n[2])};
    auto f = SpacetimeField::zeros(g, t0, dt, static_cast<int>(steps));
    for (auto& v : f.values) {
        const double re = r.get<double>();
        v = {re, r.get<double>()};
    }
    if (!r.done()) throw IoError("trailing bytes after BSF4 payload");
    return f;
}

}  // namespace bscat::io
