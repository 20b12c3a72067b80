#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "navrec/errors.hpp"

namespace navrec {

using cd = std::complex<double>;

// Row-major complex matrix. This is the workhorse container: Casorati matrices
// (pixels x frames), navigator matrices, subspace bases and small dense systems
// all use it.
struct CMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cd> a;

    CMat() = default;
    CMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    cd& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    const cd& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    std::size_t size() const { return a.size(); }
    cd* row(std::size_t r) { return a.data() + r * cols; }
    const cd* row(std::size_t r) const { return a.data() + r * cols; }
};

// Row-major real matrix (network weights, metric images).
struct RMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    RMat() = default;
    RMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    const double& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    std::size_t size() const { return a.size(); }
};

// N-dimensional dense tensor used at the I/O boundary, where payloads carry
// arbitrary dimension lists.
struct ComplexTensor {
    std::vector<std::size_t> dims;
    std::vector<cd> data;

    static ComplexTensor zeros(std::vector<std::size_t> d) {
        ComplexTensor t;
        std::size_t n = 1;
        for (std::size_t v : d) n *= v;
        t.dims = std::move(d);
        t.data.assign(n, cd(0.0, 0.0));
        return t;
    }
    std::size_t size() const { return data.size(); }
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw DimensionError(msg);
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace navrec
