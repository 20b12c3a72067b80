#pragma once

#include <cstddef>
#include <vector>

#include "navrec/types.hpp"

namespace navrec {

// Modified Bessel function of the first kind, order zero (polynomial
// approximation, ~2e-7 relative accuracy — far below the gridding error).
double bessel_i0(double x);

// Kaiser-Bessel gridding NUFFT for one H x W image: oversampling factor 2,
// kernel width 4 grid units, beta from the standard Beatty formula, analytic
// sinh deapodization. Conventions:
//   forward:  y(k) = sum_u img[u] * exp(+j k . r_u),  r_u centered at (H/2, W/2)
//   adjoint:  exact conjugate-transpose of forward (same kernel both ways)
// k-space coordinates are physical radians per pixel, |k| <= pi.
class Gridder {
public:
    Gridder(std::size_t H, std::size_t W);

    std::size_t height() const { return H_; }
    std::size_t width() const { return W_; }

    // img: H*W row-major; kx/ky/nsamp: trajectory points; y: nsamp samples
    void forward(const cd* img, const double* kx, const double* ky, std::size_t nsamp,
                 cd* y) const;
    void adjoint(const cd* y, const double* kx, const double* ky, std::size_t nsamp,
                 cd* img) const;

private:
    std::size_t H_, W_, GH_, GW_;
    std::vector<double> deapod_;  // H x W, real, includes all scaling
};

}  // namespace navrec
