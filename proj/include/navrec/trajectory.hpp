#pragma once

#include <cstddef>
#include <vector>

#include "navrec/types.hpp"

namespace navrec {

// Golden-angle increment. Successive non-navigator spokes advance by
// ~111.246 degrees so any contiguous run of spokes covers k-space
// near-uniformly.
inline constexpr double kGoldenAngle = 1.9416110387254665;  // pi*(sqrt(5)-1)/2

struct RadialTrajectory {
    std::size_t n_frames = 0;
    std::size_t spokes_per_frame = 0;
    std::size_t n_readout = 0;
    std::vector<double> angles;  // frame-major: angles[f * spokes_per_frame + s]

    double angle(std::size_t frame, std::size_t spoke) const {
        return angles[frame * spokes_per_frame + spoke];
    }
    // radial coordinate of readout index i, in [-pi, pi)
    double k_radius(std::size_t i) const {
        return 3.14159265358979323846 *
               (2.0 * static_cast<double>(i) - static_cast<double>(n_readout)) /
               static_cast<double>(n_readout);
    }
    std::size_t samples_per_frame() const { return spokes_per_frame * n_readout; }
};

// Spokes 0 and 1 of every frame sit at exactly 0 and pi/2 (navigator lines
// reacquired every frame); spokes 2.. follow the golden-angle sequence with a
// single counter running across frames, reduced mod pi. The navigator spokes
// never advance that counter.
RadialTrajectory golden_angle_trajectory(std::size_t n_frames, std::size_t spokes_per_frame,
                                         std::size_t n_readout);

// Ramp (Ram-Lak) density compensation weights for one frame of the trajectory,
// one weight per readout sample (identical for every spoke). Normalized so the
// density-compensated adjoint of fully sampled radial data reproduces unit DC:
// each sample's weight is its polar area element |k| * (pi/S) * (2pi/n) scaled
// by 1/(2pi)^2; the DC sample, shared by all S spokes, gets the central disc
// area split S ways.
std::vector<double> ramp_dcf(const RadialTrajectory& traj);

}  // namespace navrec
