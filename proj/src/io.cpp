#include "navrec/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "navrec/errors.hpp"
#include "navrec/hash.hpp"

namespace navrec {

namespace {

void check_endianness() {
    if constexpr (std::endian::native != std::endian::little)
        throw IoError("cxt1: only little-endian hosts are supported");
}

std::string temp_name(const std::string& path) { return path + ".tmp"; }

void commit_temp(const std::string& tmp, const std::string& path) {
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("failed to move temp file into place for " + path);
    }
}

template <class T>
void put(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::ifstream& f, const std::string& path) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw IoError("cxt1: truncated header in " + path);
    return v;
}

void write_cxt1(const std::string& path, const std::vector<std::uint64_t>& dims,
                std::uint16_t dtype, const void* payload, std::size_t payload_bytes,
                const std::string& meta_json) {
    check_endianness();
    if (dims.empty()) throw IoError("cxt1: dims must be non-empty");
    if (meta_json.size() > 0xffffffffull) throw IoError("cxt1: metadata too large");

    const std::string tmp = temp_name(path);
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp + " for writing");
        f.write("CXT1", 4);
        put<std::uint16_t>(f, 1);
        put<std::uint16_t>(f, static_cast<std::uint16_t>(dims.size()));
        for (auto d : dims) put<std::uint64_t>(f, d);
        put<std::uint16_t>(f, dtype);
        put<std::uint32_t>(f, static_cast<std::uint32_t>(meta_json.size()));
        f.write(meta_json.data(), static_cast<std::streamsize>(meta_json.size()));
        f.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
        f.flush();
        if (!f) {
            std::remove(tmp.c_str());
            throw IoError("write failed for " + tmp);
        }
    }
    commit_temp(tmp, path);
}

}  // namespace

void write_cxt1_complex(const std::string& path, const std::vector<std::uint64_t>& dims,
                        const cd* data, const std::string& meta_json) {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    write_cxt1(path, dims, 0, data, n * sizeof(cd), meta_json);
}

void write_cxt1_real(const std::string& path, const std::vector<std::uint64_t>& dims,
                     const double* data, const std::string& meta_json) {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    write_cxt1(path, dims, 1, data, n * sizeof(double), meta_json);
}

Cxt1File read_cxt1(const std::string& path) {
    check_endianness();
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);

    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "CXT1", 4) != 0)
        throw IoError("cxt1: bad magic in " + path);
    const auto version = take<std::uint16_t>(f, path);
    if (version != 1) throw IoError("cxt1: unsupported version in " + path);
    const auto ndims = take<std::uint16_t>(f, path);
    if (ndims == 0) throw IoError("cxt1: zero dims in " + path);

    Cxt1File out;
    out.dims.resize(ndims);
    for (auto& d : out.dims) d = take<std::uint64_t>(f, path);
    out.dtype = take<std::uint16_t>(f, path);
    if (out.dtype > 1) throw IoError("cxt1: unknown dtype in " + path);
    const auto meta_len = take<std::uint32_t>(f, path);
    out.meta_json.resize(meta_len);
    if (meta_len) {
        f.read(out.meta_json.data(), meta_len);
        if (!f) throw IoError("cxt1: truncated metadata in " + path);
    }

    const std::uint64_t n = out.count();
    if (out.dtype == 0) {
        out.cdata.resize(n);
        f.read(reinterpret_cast<char*>(out.cdata.data()),
               static_cast<std::streamsize>(n * sizeof(cd)));
    } else {
        out.rdata.resize(n);
        f.read(reinterpret_cast<char*>(out.rdata.data()),
               static_cast<std::streamsize>(n * sizeof(double)));
    }
    if (!f) throw IoError("cxt1: truncated payload in " + path);
    f.peek();
    if (!f.eof()) throw IoError("cxt1: trailing bytes after payload in " + path);
    return out;
}

void save_cmat(const std::string& path, const CMat& m, const std::string& meta_json) {
    write_cxt1_complex(path, {m.rows, m.cols}, m.a.data(), meta_json);
}

CMat load_cmat(const std::string& path, std::string* meta_json) {
    Cxt1File f = read_cxt1(path);
    if (f.dtype != 0 || f.dims.size() != 2)
        throw IoError("expected a 2-D complex tensor in " + path);
    CMat m(static_cast<std::size_t>(f.dims[0]), static_cast<std::size_t>(f.dims[1]));
    m.a = std::move(f.cdata);
    if (meta_json) *meta_json = std::move(f.meta_json);
    return m;
}

void write_text_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = temp_name(path);
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp + " for writing");
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        f.flush();
        if (!f) {
            std::remove(tmp.c_str());
            throw IoError("write failed for " + tmp);
        }
    }
    commit_temp(tmp, path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return s;
}

std::uint64_t file_fnv1a(const std::string& path) {
    const std::string s = read_text_file(path);
    return fnv1a64(s.data(), s.size());
}

void write_pgm(const std::string& path, const RMat& img, double lo, double hi) {
    if (img.rows == 0 || img.cols == 0) throw IoError("write_pgm: empty image");
    std::string out = "P5\n" + std::to_string(img.cols) + " " + std::to_string(img.rows) +
                      "\n255\n";
    const double span = hi - lo;
    out.reserve(out.size() + img.a.size());
    for (double v : img.a) {
        double t = span > 0.0 ? (v - lo) / span : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0))));
    }
    write_text_atomic(path, out);
}

}  // namespace navrec
