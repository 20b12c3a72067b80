#include "navrec/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "navrec/errors.hpp"
#include "navrec/rng.hpp"

namespace navrec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Ellipse {
    double cx, cy;  // center, pixels
    double rx, ry;  // radii, pixels
    double value;
    bool cardiac;  // radii follow the cardiac scale factor
};

// scene in units of (W, H); later entries are drawn on top (innermost wins)
std::vector<Ellipse> build_scene(double W, double H, double cardiac_scale,
                                 double resp_shift) {
    std::vector<Ellipse> scene = {
        {0.50 * W, 0.52 * H, 0.42 * W, 0.40 * H, 0.50, false},   // torso
        {0.32 * W, 0.44 * H, 0.15 * W, 0.23 * H, 0.08, false},   // left lung
        {0.68 * W, 0.44 * H, 0.15 * W, 0.23 * H, 0.08, false},   // right lung
        {0.49 * W, 0.62 * H, 0.140 * W, 0.140 * H, 0.95, true},  // myocardial ring
        {0.49 * W, 0.62 * H, 0.085 * W, 0.085 * H, 0.65, true},  // blood pool
    };
    for (Ellipse& e : scene) {
        e.cy += resp_shift;
        if (e.cardiac) {
            e.rx *= cardiac_scale;
            e.ry *= cardiac_scale;
        }
    }
    return scene;
}

double sample_scene(const std::vector<Ellipse>& scene, double x, double y) {
    // topmost (last) matching ellipse wins
    for (std::size_t i = scene.size(); i-- > 0;) {
        const Ellipse& e = scene[i];
        const double dx = (x - e.cx) / e.rx;
        const double dy = (y - e.cy) / e.ry;
        if (dx * dx + dy * dy <= 1.0) return e.value;
    }
    return 0.0;
}

}  // namespace

void PhantomConfig::validate() const {
    if (H < 4 || W < 4) throw ConfigError("phantom: grid must be at least 4x4");
    if (n_frames < 1) throw ConfigError("phantom: need at least one frame");
    if (cardiac_period < 2 || resp_period < 2)
        throw ConfigError("phantom: motion periods must be at least 2 frames");
    if (cardiac_amplitude < 0.0 || resp_amplitude < 0.0)
        throw ConfigError("phantom: motion amplitudes must be non-negative");
    if (resp_period % cardiac_period == 0 || cardiac_period % resp_period == 0)
        throw ConfigError("phantom: cardiac and respiratory periods must be "
                          "incommensurate (got " +
                          std::to_string(cardiac_period) + " and " +
                          std::to_string(resp_period) + ")");
}

CMat generate_phantom(const PhantomConfig& cfg) {
    cfg.validate();
    const std::size_t m = cfg.H * cfg.W;
    CMat X(m, cfg.n_frames);

    constexpr int kSub = 4;  // 4x4 supersampling
    const double sub_w = 1.0 / (kSub * kSub);

#pragma omp parallel for schedule(static)
    for (long long tt = 0; tt < static_cast<long long>(cfg.n_frames); ++tt) {
        const std::size_t t = static_cast<std::size_t>(tt);
        // reduce t mod period first so frames exactly one period apart get
        // bit-identical phases
        const double phi_c = kTwoPi *
                             static_cast<double>(t % cfg.cardiac_period) /
                             static_cast<double>(cfg.cardiac_period);
        const double phi_r = kTwoPi * static_cast<double>(t % cfg.resp_period) /
                             static_cast<double>(cfg.resp_period);
        const double cardiac_scale = 1.0 + cfg.cardiac_amplitude * std::sin(phi_c);
        const double resp_shift = cfg.resp_amplitude * std::sin(phi_r);
        const auto scene = build_scene(static_cast<double>(cfg.W),
                                       static_cast<double>(cfg.H), cardiac_scale,
                                       resp_shift);
        for (std::size_t p = 0; p < cfg.H; ++p) {
            for (std::size_t q = 0; q < cfg.W; ++q) {
                double acc = 0.0;
                for (int a = 0; a < kSub; ++a) {
                    const double y = static_cast<double>(p) + (a + 0.5) / kSub;
                    for (int b = 0; b < kSub; ++b) {
                        const double x = static_cast<double>(q) + (b + 0.5) / kSub;
                        acc += sample_scene(scene, x, y);
                    }
                }
                X.at(p * cfg.W + q, t) = cd(acc * sub_w, 0.0);
            }
        }
    }
    return X;
}

CoilMapSet generate_coil_maps(std::size_t H, std::size_t W, std::size_t n_coils,
                              std::uint64_t seed) {
    if (n_coils < 1) throw ConfigError("coil maps: need at least one coil");
    CoilMapSet set;
    set.n_coils = n_coils;
    set.H = H;
    set.W = W;
    set.maps.resize(n_coils * H * W);

    const double cx0 = static_cast<double>(W) / 2.0;
    const double cy0 = static_cast<double>(H) / 2.0;
    const double ring = 0.48 * static_cast<double>(std::min(H, W));
    const double sg = 0.55 * static_cast<double>(std::max(H, W));
    const double inv_2sg2 = 1.0 / (2.0 * sg * sg);

    Rng rng(seed);
    for (std::size_t c = 0; c < n_coils; ++c) {
        const double ang = kTwoPi * static_cast<double>(c) / static_cast<double>(n_coils);
        const double bx = cx0 + ring * std::cos(ang);
        const double by = cy0 + ring * std::sin(ang);
        // gentle linear phase ramp, at most ~half a cycle across the image
        const double ax = rng.uniform(-1.0, 1.0) * 3.14159265358979323846 /
                          static_cast<double>(W);
        const double ay = rng.uniform(-1.0, 1.0) * 3.14159265358979323846 /
                          static_cast<double>(H);
        const double phi0 = rng.uniform(0.0, kTwoPi);
        cd* map = set.map(c);
        for (std::size_t p = 0; p < H; ++p) {
            for (std::size_t q = 0; q < W; ++q) {
                const double dx = static_cast<double>(q) - bx;
                const double dy = static_cast<double>(p) - by;
                const double mag = std::exp(-(dx * dx + dy * dy) * inv_2sg2);
                const double ph = ax * static_cast<double>(q) +
                                  ay * static_cast<double>(p) + phi0;
                map[p * W + q] = cd(mag * std::cos(ph), mag * std::sin(ph));
            }
        }
    }

    // normalize so sum_i |s_i|^2 = 1 at the image center pixel
    const std::size_t center = (H / 2) * W + (W / 2);
    double ssq = 0.0;
    for (std::size_t c = 0; c < n_coils; ++c) ssq += std::norm(set.map(c)[center]);
    const double scale = 1.0 / std::sqrt(ssq);
    for (cd& v : set.maps) v *= scale;
    return set;
}

}  // namespace navrec
