#pragma once

#include <cstddef>
#include <vector>

#include "navrec/nufft.hpp"
#include "navrec/phantom.hpp"
#include "navrec/trajectory.hpp"
#include "navrec/types.hpp"

namespace navrec {

// Frame-indexed linear measurement model. One instance describes the whole
// dynamic acquisition; frame t maps an image vector of length image_size() to
// samples_per_frame() measurements. Implementations must be thread-safe for
// concurrent calls on distinct frames.
struct DynamicOperator {
    virtual ~DynamicOperator() = default;
    virtual std::size_t n_frames() const = 0;
    virtual std::size_t image_size() const = 0;
    virtual std::size_t samples_per_frame() const = 0;
    virtual void forward(std::size_t t, const cd* x, cd* y) const = 0;
    virtual void adjoint(std::size_t t, const cd* y, cd* x) const = 0;
};

// Multi-coil radial SENSE operator: coil weighting followed by the gridding
// NUFFT along the frame's spokes. Sample layout per frame is coil-major:
// [coil][spoke][readout].
class RadialSenseOperator : public DynamicOperator {
public:
    RadialSenseOperator(CoilMapSet maps, RadialTrajectory traj);

    std::size_t n_frames() const override { return traj_.n_frames; }
    std::size_t image_size() const override { return maps_.H * maps_.W; }
    std::size_t samples_per_frame() const override {
        return maps_.n_coils * traj_.samples_per_frame();
    }
    void forward(std::size_t t, const cd* x, cd* y) const override;
    void adjoint(std::size_t t, const cd* y, cd* x) const override;

    const RadialTrajectory& trajectory() const { return traj_; }
    const CoilMapSet& coil_maps() const { return maps_; }
    const Gridder& gridder() const { return gridder_; }

private:
    CoilMapSet maps_;
    RadialTrajectory traj_;
    Gridder gridder_;
    std::vector<double> kx_, ky_;  // frame-major sample coordinates
};

// Whole-Casorati helpers; Y is frame-major [frame][samples_per_frame].
// Parallel over frames, bit-deterministic for any thread count.
void forward_all(const DynamicOperator& A, const CMat& X, cd* Y);
CMat adjoint_all(const DynamicOperator& A, const cd* Y);

// Density-compensated adjoint ("zero-filled gridding"): the classic direct
// reconstruction from undersampled radial data, used as the initial guess and
// as the weakest baseline. dcf holds one ramp weight per readout index.
CMat zero_filled_recon(const RadialSenseOperator& A, const cd* Y,
                       const std::vector<double>& dcf);

}  // namespace navrec
