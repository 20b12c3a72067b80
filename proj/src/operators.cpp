#include "navrec/operators.hpp"

#include <cmath>
#include <string>

#include "navrec/errors.hpp"

namespace navrec {

RadialSenseOperator::RadialSenseOperator(CoilMapSet maps, RadialTrajectory traj)
    : maps_(std::move(maps)), traj_(std::move(traj)), gridder_(maps_.H, maps_.W) {
    if (maps_.n_coils < 1 || maps_.maps.size() != maps_.n_coils * maps_.H * maps_.W)
        throw DimensionError("RadialSenseOperator: inconsistent coil map set");
    // cache physical sample coordinates, frame-major
    const std::size_t spf = traj_.samples_per_frame();
    kx_.resize(traj_.n_frames * spf);
    ky_.resize(traj_.n_frames * spf);
    for (std::size_t f = 0; f < traj_.n_frames; ++f) {
        for (std::size_t s = 0; s < traj_.spokes_per_frame; ++s) {
            const double a = traj_.angle(f, s);
            const double ca = std::cos(a), sa = std::sin(a);
            double* kx = kx_.data() + f * spf + s * traj_.n_readout;
            double* ky = ky_.data() + f * spf + s * traj_.n_readout;
            for (std::size_t i = 0; i < traj_.n_readout; ++i) {
                const double r = traj_.k_radius(i);
                kx[i] = r * ca;
                ky[i] = r * sa;
            }
        }
    }
}

void RadialSenseOperator::forward(std::size_t t, const cd* x, cd* y) const {
    const std::size_t m = image_size();
    const std::size_t spf = traj_.samples_per_frame();
    const double* kx = kx_.data() + t * spf;
    const double* ky = ky_.data() + t * spf;
    std::vector<cd> weighted(m);
    for (std::size_t c = 0; c < maps_.n_coils; ++c) {
        const cd* s = maps_.map(c);
        for (std::size_t i = 0; i < m; ++i) weighted[i] = x[i] * s[i];
        gridder_.forward(weighted.data(), kx, ky, spf, y + c * spf);
    }
}

void RadialSenseOperator::adjoint(std::size_t t, const cd* y, cd* x) const {
    const std::size_t m = image_size();
    const std::size_t spf = traj_.samples_per_frame();
    const double* kx = kx_.data() + t * spf;
    const double* ky = ky_.data() + t * spf;
    std::vector<cd> img(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = cd(0.0, 0.0);
    for (std::size_t c = 0; c < maps_.n_coils; ++c) {  // fixed coil order
        gridder_.adjoint(y + c * spf, kx, ky, spf, img.data());
        const cd* s = maps_.map(c);
        for (std::size_t i = 0; i < m; ++i) x[i] += std::conj(s[i]) * img[i];
    }
}

void forward_all(const DynamicOperator& A, const CMat& X, cd* Y) {
    const std::size_t m = A.image_size();
    const std::size_t spf = A.samples_per_frame();
    if (X.rows != m || X.cols != A.n_frames())
        throw DimensionError("forward_all: Casorati shape does not match operator");
#pragma omp parallel for schedule(dynamic)
    for (long long tt = 0; tt < static_cast<long long>(A.n_frames()); ++tt) {
        const std::size_t t = static_cast<std::size_t>(tt);
        std::vector<cd> x(m);
        for (std::size_t i = 0; i < m; ++i) x[i] = X.at(i, t);
        A.forward(t, x.data(), Y + t * spf);
    }
}

CMat adjoint_all(const DynamicOperator& A, const cd* Y) {
    const std::size_t m = A.image_size();
    const std::size_t spf = A.samples_per_frame();
    CMat X(m, A.n_frames());
#pragma omp parallel for schedule(dynamic)
    for (long long tt = 0; tt < static_cast<long long>(A.n_frames()); ++tt) {
        const std::size_t t = static_cast<std::size_t>(tt);
        std::vector<cd> x(m);
        A.adjoint(t, Y + t * spf, x.data());
        for (std::size_t i = 0; i < m; ++i) X.at(i, t) = x[i];
    }
    return X;
}

CMat zero_filled_recon(const RadialSenseOperator& A, const cd* Y,
                       const std::vector<double>& dcf) {
    const RadialTrajectory& traj = A.trajectory();
    if (dcf.size() != traj.n_readout)
        throw DimensionError("zero_filled_recon: dcf length must equal n_readout");
    const std::size_t m = A.image_size();
    const std::size_t spf = A.samples_per_frame();
    const std::size_t n_coils = A.coil_maps().n_coils;
    CMat X(m, traj.n_frames);
#pragma omp parallel for schedule(dynamic)
    for (long long tt = 0; tt < static_cast<long long>(traj.n_frames); ++tt) {
        const std::size_t t = static_cast<std::size_t>(tt);
        std::vector<cd> w(spf);  // spf already includes the coil dimension
        const cd* src = Y + t * spf;
        for (std::size_t c = 0; c < n_coils; ++c)
            for (std::size_t s = 0; s < traj.spokes_per_frame; ++s)
                for (std::size_t i = 0; i < traj.n_readout; ++i) {
                    const std::size_t idx = (c * traj.spokes_per_frame + s) * traj.n_readout + i;
                    w[idx] = src[idx] * dcf[i];
                }
        std::vector<cd> x(m);
        A.adjoint(t, w.data(), x.data());
        for (std::size_t i = 0; i < m; ++i) X.at(i, t) = x[i];
    }
    return X;
}

}  // namespace navrec
