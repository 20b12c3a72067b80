#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "navrec/operators.hpp"
#include "navrec/phantom.hpp"
#include "navrec/trajectory.hpp"
#include "navrec/types.hpp"

namespace navrec {

struct KSpaceData {
    RadialTrajectory traj;
    std::size_t n_coils = 0;
    double noise_sigma = 0.0;
    std::vector<cd> data;  // [frame][coil][spoke][readout]

    std::size_t frame_stride() const {
        return n_coils * traj.spokes_per_frame * traj.n_readout;
    }
    cd* frame(std::size_t f) { return data.data() + f * frame_stride(); }
    const cd* frame(std::size_t f) const { return data.data() + f * frame_stride(); }
    cd& at(std::size_t f, std::size_t c, std::size_t s, std::size_t i) {
        return data[((f * n_coils + c) * traj.spokes_per_frame + s) * traj.n_readout + i];
    }
    const cd& at(std::size_t f, std::size_t c, std::size_t s, std::size_t i) const {
        return data[((f * n_coils + c) * traj.spokes_per_frame + s) * traj.n_readout + i];
    }
};

// Simulate the acquisition Y = A(X) + N: per-frame multi-coil NUFFT plus
// i.i.d. complex Gaussian noise with standard deviation noise_sigma per
// complex sample (sigma/sqrt(2) per component). Noise streams are derived
// per frame from the seed, so the result is independent of scheduling.
KSpaceData acquire(const CMat& X, const CoilMapSet& maps, const RadialTrajectory& traj,
                   double noise_sigma, std::uint64_t seed);

struct NavigatorRow {
    std::size_t spoke;  // 0 or 1
    std::size_t pos;    // readout position index after the 1-D inverse FFT
    std::size_t coil;
};

struct NavigatorMatrix {
    CMat Z;  // rows x n_frames
    std::vector<NavigatorRow> rows;
    std::size_t n_readout = 0;
};

// Z = PX: the two navigator spokes (0 deg and 90 deg, re-acquired every
// frame) are inverse Fourier transformed along readout; each (spoke, readout
// position, coil) triple becomes one row of Z, ordered spoke-major, then
// position, then coil. Readout positions whose RMS projection energy (over
// frames and coils) is below 5% of that spoke's maximum are dropped as
// background.
NavigatorMatrix extract_navigators(const KSpaceData& Y);

struct CoilCompressionResult {
    KSpaceData y;                     // compressed k-space (virtual coils)
    CoilMapSet maps;                  // same projection applied to the maps
    std::vector<double> eigenvalues;  // full coil-covariance spectrum, descending
    double retained_energy = 1.0;     // top-k eigenvalue mass fraction
};

// PCA coil compression: project the coil dimension of Y (and of the maps)
// onto the top eigenvectors of the coil-by-coil sample covariance.
CoilCompressionResult pca_compress_coils(const KSpaceData& Y, const CoilMapSet& maps,
                                         std::size_t target_coils);

}  // namespace navrec
