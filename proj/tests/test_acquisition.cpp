#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "navrec/acquisition.hpp"
#include "navrec/linalg.hpp"
#include "navrec/operators.hpp"
#include "navref.hpp"

using namespace navrec;
using testutil::rel_err;

TEST_CASE("noiseless acquisition equals the stacked forward operator") {
    auto s = testutil::small_setup(16, 16, 4, 2, 4);
    const KSpaceData y = acquire(s.X, s.maps, s.traj, 0.0, 3);
    RadialSenseOperator A(s.maps, s.traj);
    std::vector<cd> want(y.data.size());
    forward_all(A, s.X, want.data());
    CHECK(testutil::bit_equal(y.data.data(), want.data(), want.size()));
    CHECK(y.n_coils == 2);
    CHECK(y.noise_sigma == 0.0);
}

TEST_CASE("acquisition noise is reproducible and seed-sensitive") {
    auto s = testutil::small_setup(16, 16, 3, 2, 4);
    const KSpaceData a = acquire(s.X, s.maps, s.traj, 0.01, 5);
    const KSpaceData b = acquire(s.X, s.maps, s.traj, 0.01, 5);
    const KSpaceData c = acquire(s.X, s.maps, s.traj, 0.01, 6);
    CHECK(testutil::bit_equal(a.data.data(), b.data.data(), a.data.size()));
    CHECK_FALSE(testutil::bit_equal(a.data.data(), c.data.data(), a.data.size()));
}

TEST_CASE("empirical noise level matches the requested sigma") {
    // acquire pure noise (zero object) over > 1e5 samples
    const std::size_t H = 32, W = 32, frames = 100;
    CMat X(H * W, frames);  // zeros
    auto maps = testutil::flat_coils(H, W, 2);
    const RadialTrajectory traj = golden_angle_trajectory(frames, 8, 64);
    const double sigma = 0.05;
    const KSpaceData y = acquire(X, maps, traj, sigma, 11);
    REQUIRE(y.data.size() >= 100000);
    double acc = 0.0;
    for (const cd& v : y.data) acc += std::norm(v);
    const double rms = std::sqrt(acc / static_cast<double>(y.data.size()));
    CHECK(std::abs(rms - sigma) / sigma < 0.02);
}

TEST_CASE("static object gives time-constant navigator rows") {
    PhantomConfig cfg;
    cfg.H = cfg.W = 16;
    cfg.n_frames = 6;
    cfg.cardiac_period = 3;
    cfg.resp_period = 4;
    cfg.cardiac_amplitude = 0.0;
    cfg.resp_amplitude = 0.0;
    const CMat X = generate_phantom(cfg);
    const CoilMapSet maps = generate_coil_maps(16, 16, 2, 2);
    const RadialTrajectory traj = golden_angle_trajectory(6, 4, 32);
    const KSpaceData y = acquire(X, maps, traj, 0.0, 7);
    const NavigatorMatrix nav = extract_navigators(y);
    REQUIRE(nav.Z.cols == 6);
    for (std::size_t r = 0; r < nav.Z.rows; ++r)
        for (std::size_t t = 1; t < 6; ++t) CHECK(nav.Z.at(r, t) == nav.Z.at(r, 0));
}

TEST_CASE("navigator rows equal scaled object projections") {
    // central-slice identity: the inverse FFT of a 0-degree (90-degree) spoke
    // is sqrt(R) times the column-sum (row-sum) projection of the coil-weighted
    // image, index-reflected around the readout center
    const std::size_t H = 32, W = 32, R = 64;
    auto s = testutil::small_setup(H, W, 2, 2, 4);
    const KSpaceData y = acquire(s.X, s.maps, s.traj, 0.0, 9);
    const NavigatorMatrix nav = extract_navigators(y);
    REQUIRE(nav.n_readout == R);
    REQUIRE(!nav.rows.empty());

    const double scale = std::sqrt(static_cast<double>(R));
    for (std::size_t t = 0; t < 2; ++t) {
        for (std::size_t c = 0; c < s.maps.n_coils; ++c) {
            std::vector<cd> weighted(H * W);
            for (std::size_t i = 0; i < H * W; ++i)
                weighted[i] = s.X.at(i, t) * s.maps.map(c)[i];
            // spoke 0 runs along kx: project across rows; spoke 1 across columns
            const std::vector<cd> proj0 = ref::axis_projection(weighted.data(), H, W, 0);
            const std::vector<cd> proj1 = ref::axis_projection(weighted.data(), H, W, 1);

            double max_mag = 0.0;
            for (const cd& v : proj0) max_mag = std::max(max_mag, scale * std::abs(v));

            for (std::size_t r = 0; r < nav.rows.size(); ++r) {
                if (nav.rows[r].coil != c) continue;
                const std::size_t u = nav.rows[r].pos;
                const auto& proj = nav.rows[r].spoke == 0 ? proj0 : proj1;
                const std::size_t extent = nav.rows[r].spoke == 0 ? W : H;
                const long long q = static_cast<long long>(3 * extent) / 2 -
                                    static_cast<long long>(u);
                cd want(0, 0);
                if (q >= 0 && q < static_cast<long long>(extent))
                    want = scale * proj[static_cast<std::size_t>(q)];
                CHECK(std::abs(nav.Z.at(r, t) - want) < 1e-3 * max_mag);
            }
        }
    }
}

TEST_CASE("navigator matrix has one column per frame and only spokes 0-1") {
    auto s = testutil::small_setup(16, 16, 5, 2, 6);
    const KSpaceData y = acquire(s.X, s.maps, s.traj, 0.001, 13);
    const NavigatorMatrix nav = extract_navigators(y);
    CHECK(nav.Z.cols == 5);
    for (const NavigatorRow& r : nav.rows) {
        CHECK(r.spoke <= 1);
        CHECK(r.pos < nav.n_readout);
        CHECK(r.coil < 2);
    }
}

TEST_CASE("low-energy readout tails are dropped") {
    // an object occupying the grid center leaves the projection tails empty;
    // the kept positions must be fewer than the full readout
    auto s = testutil::small_setup(32, 32, 2, 1, 4);
    const KSpaceData y = acquire(s.X, s.maps, s.traj, 0.0, 17);
    const NavigatorMatrix nav = extract_navigators(y);
    CHECK(nav.Z.rows < 2 * nav.n_readout * 1);
    CHECK(nav.Z.rows > 0);
}

TEST_CASE("full-rank coil compression preserves energy") {
    auto s = testutil::small_setup(16, 16, 3, 4, 4);
    const KSpaceData y = acquire(s.X, s.maps, s.traj, 0.002, 19);
    const CoilCompressionResult out = pca_compress_coils(y, s.maps, 4);
    const double n_in = det_norm2(y.data.data(), y.data.size());
    const double n_out = det_norm2(out.y.data.data(), out.y.data.size());
    CHECK(std::abs(n_out - n_in) / n_in < 1e-10);
    CHECK(out.retained_energy == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.y.n_coils == 4);
    CHECK(out.maps.n_coils == 4);
}

TEST_CASE("retained compression energy matches a dense eigendecomposition") {
    const std::size_t target = 4;
    auto s = testutil::small_setup(16, 16, 5, 8, 4);
    const KSpaceData y = acquire(s.X, s.maps, s.traj, 0.001, 23);
    const CoilCompressionResult out = pca_compress_coils(y, s.maps, target);

    // oracle: coil-by-coil covariance accumulated sample by sample
    const std::size_t C = 8;
    const std::size_t per_coil = y.traj.samples_per_frame();
    CMat cov(C, C);
    for (std::size_t t = 0; t < y.traj.n_frames; ++t)
        for (std::size_t c1 = 0; c1 < C; ++c1)
            for (std::size_t c2 = 0; c2 < C; ++c2) {
                cd acc(0, 0);
                for (std::size_t i = 0; i < per_coil; ++i) {
                    const std::size_t sp = i / y.traj.n_readout;
                    const std::size_t rd = i % y.traj.n_readout;
                    acc += std::conj(y.at(t, c1, sp, rd)) * y.at(t, c2, sp, rd);
                }
                cov.at(c1, c2) += acc;
            }
    const ref::SvdRef eig = ref::svd_jacobi(cov);  // Hermitian PSD: singular = eigen
    double top = 0.0, total = 0.0;
    for (std::size_t i = 0; i < eig.s.size(); ++i) {
        total += eig.s[i];
        if (i < target) top += eig.s[i];
    }
    CHECK(out.retained_energy == doctest::Approx(top / total).epsilon(1e-8));

    // eigenvalue lists agree as well
    REQUIRE(out.eigenvalues.size() == C);
    for (std::size_t i = 0; i < C; ++i)
        CHECK(out.eigenvalues[i] == doctest::Approx(eig.s[i]).epsilon(1e-8));
}

TEST_CASE("compression to one coil and shape bookkeeping") {
    auto s = testutil::small_setup(16, 16, 2, 8, 3);
    const KSpaceData y = acquire(s.X, s.maps, s.traj, 0.0, 29);
    const CoilCompressionResult out = pca_compress_coils(y, s.maps, 1);
    CHECK(out.y.n_coils == 1);
    CHECK(out.y.data.size() == y.data.size() / 8);
    CHECK(out.maps.n_coils == 1);
    CHECK(out.retained_energy <= 1.0);
    CHECK(out.retained_energy > 0.5);  // smooth coils overlap heavily
}

TEST_CASE("compression beyond the coil count is rejected") {
    auto s = testutil::small_setup(16, 16, 2, 2, 3);
    const KSpaceData y = acquire(s.X, s.maps, s.traj, 0.0, 31);
    CHECK_THROWS_AS(pca_compress_coils(y, s.maps, 3), DimensionError);
}

TEST_CASE("compressed data stays consistent with the compressed model") {
    // projecting the measurements and projecting the maps commute with the
    // linear forward model, so the noiseless virtual-coil data must equal the
    // forward model through the virtual maps up to rounding
    auto s = testutil::small_setup(32, 32, 3, 6, 5);
    const KSpaceData y = acquire(s.X, s.maps, s.traj, 0.0, 37);
    const CoilCompressionResult out = pca_compress_coils(y, s.maps, 3);
    RadialSenseOperator A(out.maps, s.traj);
    std::vector<cd> want(out.y.data.size());
    forward_all(A, s.X, want.data());
    CHECK(rel_err(out.y.data.data(), want.data(), want.size()) < 1e-10);
}
