#pragma once

// Shared fixtures for the unit tests: random fills, error measures, small
// acquisition setups and a scratch-directory guard for I/O and CLI tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "navrec/acquisition.hpp"
#include "navrec/linalg.hpp"
#include "navrec/operators.hpp"
#include "navrec/phantom.hpp"
#include "navrec/rng.hpp"
#include "navrec/trajectory.hpp"
#include "navrec/types.hpp"

namespace testutil {

using navrec::cd;
using navrec::CMat;
using navrec::RMat;

inline void fill_random(cd* x, std::size_t n, navrec::Rng& rng) {
    for (std::size_t i = 0; i < n; ++i) x[i] = cd(rng.gaussian(), rng.gaussian());
}

inline void fill_random(double* x, std::size_t n, navrec::Rng& rng) {
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.gaussian();
}

inline void fill_random(cd* x, std::size_t n, std::uint64_t seed) {
    navrec::Rng rng(seed);
    fill_random(x, n, rng);
}

inline void fill_random(double* x, std::size_t n, std::uint64_t seed) {
    navrec::Rng rng(seed);
    fill_random(x, n, rng);
}

inline CMat random_cmat(std::size_t r, std::size_t c, std::uint64_t seed) {
    CMat m(r, c);
    navrec::Rng rng(seed);
    fill_random(m.a.data(), m.a.size(), rng);
    return m;
}

inline RMat random_rmat(std::size_t r, std::size_t c, std::uint64_t seed) {
    RMat m(r, c);
    navrec::Rng rng(seed);
    fill_random(m.a.data(), m.a.size(), rng);
    return m;
}

inline double rel_err(const cd* a, const cd* b, std::size_t n) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double rel_err(const std::vector<cd>& a, const std::vector<cd>& b) {
    return rel_err(a.data(), b.data(), a.size());
}

inline double rel_err(const CMat& a, const CMat& b) {
    return rel_err(a.a.data(), b.a.data(), a.a.size());
}

inline double rel_err(const double* a, const double* b, std::size_t n) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double max_abs_diff(const cd* a, const cd* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline bool bit_equal(const cd* a, const cd* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (a[i].real() != b[i].real() || a[i].imag() != b[i].imag()) return false;
    return true;
}

inline bool bit_equal(const CMat& a, const CMat& b) {
    return a.rows == b.rows && a.cols == b.cols && bit_equal(a.a.data(), b.a.data(), a.a.size());
}

// Uniform coil maps (all ones) for tests that want the plain gridding operator.
inline navrec::CoilMapSet flat_coils(std::size_t H, std::size_t W, std::size_t c = 1) {
    navrec::CoilMapSet maps;
    maps.n_coils = c;
    maps.H = H;
    maps.W = W;
    maps.maps.assign(c * H * W, cd(1.0, 0.0));
    return maps;
}

// Small dynamic acquisition: phantom + smooth coils + golden-angle spokes.
struct SmallSetup {
    CMat X;  // ground truth Casorati
    navrec::CoilMapSet maps;
    navrec::RadialTrajectory traj;
};

inline SmallSetup small_setup(std::size_t H, std::size_t W, std::size_t frames,
                              std::size_t coils, std::size_t spokes,
                              std::uint64_t seed = 1) {
    navrec::PhantomConfig pc;
    pc.H = H;
    pc.W = W;
    pc.n_frames = frames;
    pc.cardiac_period = 5;
    pc.resp_period = 7;
    pc.cardiac_amplitude = 0.15;
    pc.resp_amplitude = H / 16.0;
    pc.seed = seed;
    SmallSetup s;
    s.X = navrec::generate_phantom(pc);
    s.maps = navrec::generate_coil_maps(H, W, coils, seed + 1);
    s.traj = navrec::golden_angle_trajectory(frames, spokes, 2 * std::max(H, W));
    return s;
}

// Truncate a Casorati matrix to exact rank r via the library SVD.
CMat truncate_rank(const CMat& X, std::size_t r);

// Zero all spectral content outside |k| <= frac*pi (per frame). Radial spokes
// only cover that disc, so a truth prepared this way keeps the solvers'
// fixed point reachable at small iteration budgets.
void bandlimit_disc(CMat& X, std::size_t H, std::size_t W, double frac = 0.8);

// Measurements of a Casorati matrix through an operator, laid out the way the
// solvers expect them: frame-major, frame t at offset t * samples_per_frame.
std::vector<cd> forward_measurements(const navrec::DynamicOperator& A, const CMat& X);

// Scratch directory created under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir();
    ~TempDir();
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// Run the CLI in-process with a argv list (program name prepended).
int cli(const std::vector<std::string>& args);

}  // namespace testutil
