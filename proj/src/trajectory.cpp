#include "navrec/trajectory.hpp"

#include <cmath>

#include "navrec/errors.hpp"

namespace navrec {

RadialTrajectory golden_angle_trajectory(std::size_t n_frames, std::size_t spokes_per_frame,
                                         std::size_t n_readout) {
    if (spokes_per_frame < 3)
        throw ConfigError("golden_angle_trajectory: need at least 3 spokes per frame "
                          "(2 navigators + 1 imaging spoke)");
    if (n_frames < 1 || n_readout < 2)
        throw ConfigError("golden_angle_trajectory: empty trajectory requested");

    constexpr double pi = 3.14159265358979323846;
    constexpr double half_pi = 1.57079632679489661923;

    RadialTrajectory traj;
    traj.n_frames = n_frames;
    traj.spokes_per_frame = spokes_per_frame;
    traj.n_readout = n_readout;
    traj.angles.resize(n_frames * spokes_per_frame);

    std::size_t j = 0;  // global counter over non-navigator spokes only
    for (std::size_t f = 0; f < n_frames; ++f) {
        double* row = traj.angles.data() + f * spokes_per_frame;
        row[0] = 0.0;
        row[1] = half_pi;
        for (std::size_t s = 2; s < spokes_per_frame; ++s, ++j)
            row[s] = std::fmod(static_cast<double>(j) * kGoldenAngle, pi);
    }
    return traj;
}

std::vector<double> ramp_dcf(const RadialTrajectory& traj) {
    constexpr double pi = 3.14159265358979323846;
    const double S = static_cast<double>(traj.spokes_per_frame);
    const double n = static_cast<double>(traj.n_readout);
    const double dk = 2.0 * pi / n;            // radial sample spacing
    const double dtheta = pi / S;              // angular spacing across [0, pi)
    const double inv_4pi2 = 1.0 / (4.0 * pi * pi);

    std::vector<double> w(traj.n_readout);
    for (std::size_t i = 0; i < traj.n_readout; ++i) {
        const double r = std::abs(traj.k_radius(i));
        if (r == 0.0) {
            // central disc of radius dk/2, shared by every spoke
            w[i] = pi * (dk / 2.0) * (dk / 2.0) / S * inv_4pi2;
        } else {
            w[i] = r * dtheta * dk * inv_4pi2;
        }
    }
    return w;
}

}  // namespace navrec
