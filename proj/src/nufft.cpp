#include "navrec/nufft.hpp"

#include <cmath>
#include <string>

#include "navrec/errors.hpp"
#include "navrec/fft.hpp"

namespace navrec {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kKernelWidth = 4.0;  // grid units, oversampled grid
// Beatty beta for oversampling 2, width 4: pi * sqrt((W/s)^2 (s-1/2)^2 - 0.8)
const double kBeta = kPi * std::sqrt(8.2);

// kernel value at distance d (grid units) from the sample, |d| <= W/2
inline double kb_kernel(double d) {
    const double t = 2.0 * d / kKernelWidth;  // in [-1, 1]
    const double arg = 1.0 - t * t;
    if (arg <= 0.0) return arg == 0.0 ? 1.0 : 0.0;  // i0(0) = 1 at the edge
    return bessel_i0(kBeta * std::sqrt(arg));
}

// analytic Fourier transform of the width-W kernel at image offset w on a
// G-point grid: W * sinh(s)/s with s = sqrt(beta^2 - (pi*W*w/G)^2)
inline double kb_transform(double w, double G) {
    const double a = kPi * kKernelWidth * w / G;
    const double s2 = kBeta * kBeta - a * a;
    const double s = std::sqrt(s2);  // s2 > 0 for |w| <= G/4 since beta > pi
    return kKernelWidth * std::sinh(s) / s;
}

}  // namespace

double bessel_i0(double x) {
    const double ax = std::fabs(x);
    if (ax < 3.75) {
        const double t = (x / 3.75) * (x / 3.75);
        return 1.0 +
               t * (3.5156229 +
                    t * (3.0899424 +
                         t * (1.2067492 +
                              t * (0.2659732 + t * (0.0360768 + t * 0.0045813)))));
    }
    const double t = 3.75 / ax;
    return (std::exp(ax) / std::sqrt(ax)) *
           (0.39894228 +
            t * (0.01328592 +
                 t * (0.00225319 +
                      t * (-0.00157565 +
                           t * (0.00916281 +
                                t * (-0.02057706 +
                                     t * (0.02635537 +
                                          t * (-0.01647633 + t * 0.00392377))))))));
}

Gridder::Gridder(std::size_t H, std::size_t W) : H_(H), W_(W), GH_(2 * H), GW_(2 * W) {
    if (!is_pow2(H) || !is_pow2(W))
        throw DimensionError("Gridder: image sides must be powers of two, got " +
                             std::to_string(H) + "x" + std::to_string(W));
    deapod_.resize(H * W);
    std::vector<double> dy(H), dx(W);
    for (std::size_t p = 0; p < H; ++p)
        dy[p] = 1.0 / kb_transform(static_cast<double>(p) - static_cast<double>(H) / 2.0,
                                   static_cast<double>(GH_));
    for (std::size_t q = 0; q < W; ++q)
        dx[q] = 1.0 / kb_transform(static_cast<double>(q) - static_cast<double>(W) / 2.0,
                                   static_cast<double>(GW_));
    for (std::size_t p = 0; p < H; ++p)
        for (std::size_t q = 0; q < W; ++q) deapod_[p * W + q] = dy[p] * dx[q];
}

namespace {

struct WindowIdx {
    std::size_t idx[4];   // wrapped grid indices
    double w[4];          // kernel weights
};

inline WindowIdx kernel_window(double g, std::size_t G) {
    WindowIdx out;
    const double fl = std::floor(g);
    const long long base = static_cast<long long>(fl) - 1;
    for (int m = 0; m < 4; ++m) {
        const long long raw = base + m;
        const long long wrapped = ((raw % static_cast<long long>(G)) +
                                   static_cast<long long>(G)) %
                                  static_cast<long long>(G);
        out.idx[m] = static_cast<std::size_t>(wrapped);
        out.w[m] = kb_kernel(g - static_cast<double>(raw));
    }
    return out;
}

inline void check_point(double kx, double ky) {
    const double r = std::sqrt(kx * kx + ky * ky);
    if (r > kPi * (1.0 + 1e-9))
        throw DimensionError("Gridder: trajectory point outside |k| <= pi (|k| = " +
                             std::to_string(r) + ")");
}

}  // namespace

void Gridder::forward(const cd* img, const double* kx, const double* ky,
                      std::size_t nsamp, cd* y) const {
    std::vector<cd> grid(GH_ * GW_, cd(0.0, 0.0));
    const std::size_t off_p = GH_ / 2 - H_ / 2;
    const std::size_t off_q = GW_ / 2 - W_ / 2;
    for (std::size_t p = 0; p < H_; ++p) {
        cd* dst = grid.data() + (p + off_p) * GW_ + off_q;
        const cd* src = img + p * W_;
        const double* dpd = deapod_.data() + p * W_;
        for (std::size_t q = 0; q < W_; ++q) dst[q] = src[q] * dpd[q];
    }
    // centered raw transform with e^{+j} kernel: matches forward convention
    fft2_centered_raw(grid.data(), grid.data(), GH_, GW_, /*inverse=*/true);

    const double sx = static_cast<double>(GW_) / (2.0 * kPi);
    const double sy = static_cast<double>(GH_) / (2.0 * kPi);
    for (std::size_t i = 0; i < nsamp; ++i) {
        check_point(kx[i], ky[i]);
        const double gx = kx[i] * sx + static_cast<double>(GW_) / 2.0;
        const double gy = ky[i] * sy + static_cast<double>(GH_) / 2.0;
        const WindowIdx wx = kernel_window(gx, GW_);
        const WindowIdx wy = kernel_window(gy, GH_);
        cd acc(0.0, 0.0);
        for (int a = 0; a < 4; ++a) {
            const cd* row = grid.data() + wy.idx[a] * GW_;
            cd racc(0.0, 0.0);
            for (int b = 0; b < 4; ++b) racc += wx.w[b] * row[wx.idx[b]];
            acc += wy.w[a] * racc;
        }
        y[i] = acc;
    }
}

void Gridder::adjoint(const cd* y, const double* kx, const double* ky,
                      std::size_t nsamp, cd* img) const {
    std::vector<cd> grid(GH_ * GW_, cd(0.0, 0.0));
    const double sx = static_cast<double>(GW_) / (2.0 * kPi);
    const double sy = static_cast<double>(GH_) / (2.0 * kPi);
    for (std::size_t i = 0; i < nsamp; ++i) {
        check_point(kx[i], ky[i]);
        const double gx = kx[i] * sx + static_cast<double>(GW_) / 2.0;
        const double gy = ky[i] * sy + static_cast<double>(GH_) / 2.0;
        const WindowIdx wx = kernel_window(gx, GW_);
        const WindowIdx wy = kernel_window(gy, GH_);
        const cd v = y[i];
        for (int a = 0; a < 4; ++a) {
            cd* row = grid.data() + wy.idx[a] * GW_;
            const cd vy = wy.w[a] * v;
            for (int b = 0; b < 4; ++b) row[wx.idx[b]] += wx.w[b] * vy;
        }
    }
    // adjoint of the raw e^{+j} transform is the raw e^{-j} transform
    fft2_centered_raw(grid.data(), grid.data(), GH_, GW_, /*inverse=*/false);

    const std::size_t off_p = GH_ / 2 - H_ / 2;
    const std::size_t off_q = GW_ / 2 - W_ / 2;
    for (std::size_t p = 0; p < H_; ++p) {
        const cd* src = grid.data() + (p + off_p) * GW_ + off_q;
        const double* dpd = deapod_.data() + p * W_;
        cd* dst = img + p * W_;
        for (std::size_t q = 0; q < W_; ++q) dst[q] = src[q] * dpd[q];
    }
}

}  // namespace navrec
