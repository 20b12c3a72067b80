#include "navrec/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "navrec/errors.hpp"

namespace navrec {

namespace {

// Plan cache. FFTW plan creation is not thread-safe, execution via
// fftw_execute_dft on private arrays is. FFTW_ESTIMATE keeps planning
// deterministic (no runtime measurement).
std::mutex g_plan_mutex;
std::map<std::tuple<int, int, int, int>, fftw_plan> g_plans;

fftw_plan plan_for(int rank, int n0, int n1, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_tuple(rank, n0, n1, sign);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    const std::size_t total = static_cast<std::size_t>(n0) * (rank == 2 ? n1 : 1);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = (rank == 2)
                      ? fftw_plan_dft_2d(n0, n1, buf, buf, sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED)
                      : fftw_plan_dft_1d(n0, buf, buf, sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw NumericalError("fft: FFTW plan creation failed");
    g_plans.emplace(key, p);
    return p;
}

// work[u] = in[(u + n/2) % n] along each axis (ifftshift == fftshift for even
// n, and n is a power of two here).
void shift2_into(const cd* in, cd* out, std::size_t H, std::size_t W) {
    const std::size_t h2 = H / 2, w2 = W / 2;
    for (std::size_t p = 0; p < H; ++p) {
        const cd* src = in + ((p + h2) % H) * W;
        cd* dst = out + p * W;
        for (std::size_t q = 0; q < W; ++q) dst[q] = src[(q + w2) % W];
    }
}

void fft2_impl(const cd* in, cd* out, std::size_t H, std::size_t W, bool inverse,
               double scale) {
    if (!is_pow2(H) || !is_pow2(W))
        throw DimensionError("fft2_centered: grid sides must be powers of two, got " +
                             std::to_string(H) + "x" + std::to_string(W));
    std::vector<cd> work(H * W);
    shift2_into(in, work.data(), H, W);
    fftw_plan p = plan_for(2, static_cast<int>(H), static_cast<int>(W),
                           inverse ? FFTW_BACKWARD : FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(work.data()),
                     reinterpret_cast<fftw_complex*>(work.data()));
    // shift back and scale in one pass
    const std::size_t h2 = H / 2, w2 = W / 2;
    for (std::size_t p2 = 0; p2 < H; ++p2) {
        const cd* src = work.data() + ((p2 + h2) % H) * W;
        cd* dst = out + p2 * W;
        for (std::size_t q = 0; q < W; ++q) dst[q] = src[(q + w2) % W] * scale;
    }
}

}  // namespace

void fft2_centered(const cd* in, cd* out, std::size_t H, std::size_t W, bool inverse) {
    fft2_impl(in, out, H, W, inverse, 1.0 / std::sqrt(static_cast<double>(H * W)));
}

void fft2_centered_raw(const cd* in, cd* out, std::size_t H, std::size_t W, bool inverse) {
    fft2_impl(in, out, H, W, inverse, 1.0);
}

void fft1_centered(const cd* in, cd* out, std::size_t n, bool inverse) {
    if (!is_pow2(n))
        throw DimensionError("fft1_centered: length must be a power of two, got " +
                             std::to_string(n));
    const std::size_t h = n / 2;
    std::vector<cd> work(n);
    for (std::size_t u = 0; u < n; ++u) work[u] = in[(u + h) % n];
    fftw_plan p = plan_for(1, static_cast<int>(n), 0,
                           inverse ? FFTW_BACKWARD : FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(work.data()),
                     reinterpret_cast<fftw_complex*>(work.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) out[k] = work[(k + h) % n] * scale;
}

}  // namespace navrec
