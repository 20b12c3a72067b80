#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "navrec/types.hpp"

namespace navrec {

// Container format for every tensor artifact the pipeline writes:
//   "CXT1" | version u16 | ndims u16 | dims u64[ndims] | dtype u16
//   | meta length u32 | meta UTF-8 JSON | payload row-major little-endian
// dtype 0 = complex128 (interleaved re,im), 1 = float64.
struct Cxt1File {
    std::vector<std::uint64_t> dims;
    std::uint16_t dtype = 0;
    std::string meta_json = "{}";
    std::vector<cd> cdata;       // filled when dtype == 0
    std::vector<double> rdata;   // filled when dtype == 1

    std::uint64_t count() const {
        std::uint64_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
};

// Writers are atomic: payload goes to a temp file in the same directory which
// is renamed over the target only after a successful flush.
void write_cxt1_complex(const std::string& path, const std::vector<std::uint64_t>& dims,
                        const cd* data, const std::string& meta_json = "{}");
void write_cxt1_real(const std::string& path, const std::vector<std::uint64_t>& dims,
                     const double* data, const std::string& meta_json = "{}");
Cxt1File read_cxt1(const std::string& path);

// 2-D complex convenience wrappers (dims = [rows, cols])
void save_cmat(const std::string& path, const CMat& m, const std::string& meta_json = "{}");
CMat load_cmat(const std::string& path, std::string* meta_json = nullptr);

void write_text_atomic(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// FNV-1a 64 over the file's bytes; used by manifests and the compare command.
std::uint64_t file_fnv1a(const std::string& path);

// Binary 8-bit PGM with linear windowing [lo, hi] -> [0, 255].
void write_pgm(const std::string& path, const RMat& img, double lo, double hi);

}  // namespace navrec
