#include "navrec/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "navrec/errors.hpp"
#include "navrec/fft.hpp"
#include "navrec/linalg.hpp"
#include "navrec/rng.hpp"

namespace navrec {

KSpaceData acquire(const CMat& X, const CoilMapSet& maps, const RadialTrajectory& traj,
                   double noise_sigma, std::uint64_t seed) {
    if (noise_sigma < 0.0) throw ConfigError("acquire: noise_sigma must be >= 0");
    if (X.rows != maps.H * maps.W)
        throw DimensionError("acquire: Casorati rows do not match the coil map grid");
    if (X.cols != traj.n_frames)
        throw DimensionError("acquire: Casorati columns do not match trajectory frames");

    RadialSenseOperator A(maps, traj);
    KSpaceData out;
    out.traj = traj;
    out.n_coils = maps.n_coils;
    out.noise_sigma = noise_sigma;
    out.data.resize(traj.n_frames * out.frame_stride());
    forward_all(A, X, out.data.data());

    if (noise_sigma > 0.0) {
        const double comp_sigma = noise_sigma / std::sqrt(2.0);
        const std::size_t fs = out.frame_stride();
#pragma omp parallel for schedule(static)
        for (long long ff = 0; ff < static_cast<long long>(traj.n_frames); ++ff) {
            const std::size_t f = static_cast<std::size_t>(ff);
            Rng rng = Rng::child(seed, f);
            cd* fr = out.frame(f);
            for (std::size_t i = 0; i < fs; ++i) {
                const double re = comp_sigma * rng.gaussian();
                const double im = comp_sigma * rng.gaussian();
                fr[i] += cd(re, im);
            }
        }
    }
    return out;
}

NavigatorMatrix extract_navigators(const KSpaceData& Y) {
    const RadialTrajectory& traj = Y.traj;
    if (traj.spokes_per_frame < 2)
        throw DimensionError("extract_navigators: trajectory has no navigator spokes");
    const std::size_t n = traj.n_frames;
    const std::size_t R = traj.n_readout;
    const std::size_t C = Y.n_coils;

    // profiles[spoke][(t*C + c)*R + u]: 1-D centered inverse FFT along readout
    std::vector<std::vector<cd>> profiles(2, std::vector<cd>(n * C * R));
    for (std::size_t s = 0; s < 2; ++s) {
#pragma omp parallel for schedule(static)
        for (long long tt = 0; tt < static_cast<long long>(n); ++tt) {
            const std::size_t t = static_cast<std::size_t>(tt);
            for (std::size_t c = 0; c < C; ++c) {
                const cd* src = &Y.at(t, c, s, 0);
                cd* dst = profiles[s].data() + (t * C + c) * R;
                fft1_centered(src, dst, R, /*inverse=*/true);
            }
        }
    }

    NavigatorMatrix nav;
    nav.n_readout = R;
    // energy screen per spoke: RMS over frames and coils at each position
    std::vector<std::vector<std::size_t>> kept(2);
    for (std::size_t s = 0; s < 2; ++s) {
        std::vector<double> energy(R, 0.0);
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t c = 0; c < C; ++c) {
                const cd* prof = profiles[s].data() + (t * C + c) * R;
                for (std::size_t u = 0; u < R; ++u) energy[u] += std::norm(prof[u]);
            }
        double emax = 0.0;
        for (double e : energy) emax = std::max(emax, e);
        if (emax <= 0.0)
            throw DegenerateInputError("extract_navigators: navigator spokes carry no energy");
        const double thresh = 0.05 * 0.05 * emax;  // 5% of max RMS, compared squared
        for (std::size_t u = 0; u < R; ++u)
            if (energy[u] >= thresh) kept[s].push_back(u);
    }

    std::size_t n_rows = 0;
    for (std::size_t s = 0; s < 2; ++s) n_rows += kept[s].size() * C;
    nav.Z = CMat(n_rows, n);
    nav.rows.reserve(n_rows);
    std::size_t r = 0;
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t u : kept[s])
            for (std::size_t c = 0; c < C; ++c, ++r) {
                nav.rows.push_back({s, u, c});
                for (std::size_t t = 0; t < n; ++t)
                    nav.Z.at(r, t) = profiles[s][(t * C + c) * R + u];
            }
    return nav;
}

CoilCompressionResult pca_compress_coils(const KSpaceData& Y, const CoilMapSet& maps,
                                         std::size_t target_coils) {
    const std::size_t C = Y.n_coils;
    if (target_coils < 1 || target_coils > C)
        throw DimensionError("pca_compress_coils: target coil count " +
                             std::to_string(target_coils) + " out of range for " +
                             std::to_string(C) + " coils");
    if (maps.n_coils != C)
        throw DimensionError("pca_compress_coils: coil map count does not match data");

    const std::size_t per_coil = Y.traj.spokes_per_frame * Y.traj.n_readout;
    const std::size_t n_frames = Y.traj.n_frames;

    // coil-by-coil sample covariance, accumulated in fixed order
    CMat cov(C, C);
    std::vector<cd> v(C);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const cd* fr = Y.frame(f);
        for (std::size_t i = 0; i < per_coil; ++i) {
            for (std::size_t c = 0; c < C; ++c) v[c] = fr[c * per_coil + i];
            for (std::size_t a = 0; a < C; ++a)
                for (std::size_t b = 0; b < C; ++b)
                    cov.at(a, b) += v[a] * std::conj(v[b]);
        }
    }

    EigResult eig = hermitian_eig(cov);
    double total = 0.0, kept = 0.0;
    for (std::size_t i = 0; i < C; ++i) {
        total += eig.values[i];
        if (i < target_coils) kept += eig.values[i];
    }

    CoilCompressionResult out;
    out.eigenvalues = eig.values;
    out.retained_energy = total > 0.0 ? kept / total : 1.0;

    out.y.traj = Y.traj;
    out.y.n_coils = target_coils;
    out.y.noise_sigma = Y.noise_sigma;
    out.y.data.resize(n_frames * out.y.frame_stride());
#pragma omp parallel for schedule(static)
    for (long long ff = 0; ff < static_cast<long long>(n_frames); ++ff) {
        const std::size_t f = static_cast<std::size_t>(ff);
        const cd* src = Y.frame(f);
        cd* dst = out.y.frame(f);
        for (std::size_t vcoil = 0; vcoil < target_coils; ++vcoil)
            for (std::size_t i = 0; i < per_coil; ++i) {
                cd acc(0.0, 0.0);
                for (std::size_t c = 0; c < C; ++c)
                    acc += std::conj(eig.vectors.at(c, vcoil)) * src[c * per_coil + i];
                dst[vcoil * per_coil + i] = acc;
            }
    }

    out.maps.n_coils = target_coils;
    out.maps.H = maps.H;
    out.maps.W = maps.W;
    out.maps.maps.resize(target_coils * maps.H * maps.W);
    const std::size_t m = maps.H * maps.W;
    for (std::size_t vcoil = 0; vcoil < target_coils; ++vcoil) {
        cd* dst = out.maps.map(vcoil);
        for (std::size_t i = 0; i < m; ++i) {
            cd acc(0.0, 0.0);
            for (std::size_t c = 0; c < C; ++c)
                acc += std::conj(eig.vectors.at(c, vcoil)) * maps.map(c)[i];
            dst[i] = acc;
        }
    }
    return out;
}

}  // namespace navrec
