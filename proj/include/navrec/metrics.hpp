#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "navrec/types.hpp"

namespace navrec {

// All three metrics operate on real (magnitude) images of equal shape.

// 20*log10(||ref|| / ||ref - rec||), capped at 300 dB (exact match hits the cap).
double ser_db(const RMat& ref, const RMat& rec);

struct SsimOptions {
    std::size_t window = 11;  // odd
    double sigma = 1.5;
    double k1 = 0.01;  // C1 = (k1*L)^2 with L = max(ref)
    double k2 = 0.03;  // C2 = (k2*L)^2
};

// Mean local SSIM with a Gaussian window, averaged over fully-interior windows.
double ssim(const RMat& ref, const RMat& rec, const SsimOptions& opts = {});

struct HfenOptions {
    std::size_t window = 15;  // odd
    double sigma = 1.5;
};

// ||LoG(rec) - LoG(ref)|| / ||LoG(ref)|| with a zero-mean Laplacian-of-Gaussian
// kernel and symmetric (mirror) boundary handling.
double hfen(const RMat& ref, const RMat& rec, const HfenOptions& opts = {});

// The 1-D Gaussian sample g[i] = exp(-(i-c)^2 / (2 sigma^2)), c = (window-1)/2.
std::vector<double> gaussian_taps(std::size_t window, double sigma);

struct MetricReport {
    std::vector<double> ser, ssim, hfen;  // one entry per frame
    double ser_mean = 0, ser_std = 0;
    double ssim_mean = 0, ssim_std = 0;
    double hfen_mean = 0, hfen_std = 0;
};

// Frame-by-frame comparison of two Casorati matrices whose columns are H*W
// images; metrics act on magnitudes. Means/stds are over frames (sample std).
MetricReport evaluate_casorati(const CMat& ref, const CMat& rec, std::size_t H,
                               std::size_t W, const SsimOptions& sopts = {},
                               const HfenOptions& hopts = {});

// CSV with one row per frame and mean/std footer rows.
std::string metrics_csv(const MetricReport& rep);

}  // namespace navrec
