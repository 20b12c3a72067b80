#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "navrec/types.hpp"

namespace navrec {

struct PhantomConfig {
    std::size_t H = 128;
    std::size_t W = 128;
    std::size_t n_frames = 200;
    std::size_t cardiac_period = 22;  // frames per cardiac cycle
    std::size_t resp_period = 85;     // frames per respiratory cycle
    double cardiac_amplitude = 0.15;  // fractional modulation of the heart radii
    double resp_amplitude = 4.0;      // vertical translation in pixels
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError
};

// Free-breathing, ungated dynamic phantom. Frames are analytic ellipse scenes
// (torso, two lungs, myocardial ring, blood pool) rasterized with 4x4 subpixel
// supersampling. The heart radii scale with the cardiac phase, everything
// translates vertically with the respiratory phase; picking incommensurate
// periods makes the voxel profiles trace a 2-torus-like manifold. Values in
// [0, 1], real. Returned as a Casorati matrix: rows = voxel profiles (H*W),
// columns = frames. Phases are computed from (t mod period) so frames one
// period apart are bit-identical.
CMat generate_phantom(const PhantomConfig& cfg);

struct CoilMapSet {
    std::size_t n_coils = 0;
    std::size_t H = 0;
    std::size_t W = 0;
    std::vector<cd> maps;  // coil-major, each H*W row-major

    const cd* map(std::size_t c) const { return maps.data() + c * H * W; }
    cd* map(std::size_t c) { return maps.data() + c * H * W; }
};

// Smooth synthetic sensitivities: complex Gaussian bumps centered on a ring
// just inside the image border, each with a seeded gentle linear phase ramp;
// jointly normalized so sum_i |s_i|^2 = 1 at the image center.
CoilMapSet generate_coil_maps(std::size_t H, std::size_t W, std::size_t n_coils,
                              std::uint64_t seed);

}  // namespace navrec
