// Timing harness comparing the OpenMP kernels against their serial reference
// twins. Prints wall time, speedup and the worst element difference so a run
// doubles as a determinism spot check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "navref.hpp"
#include "navrec/dae.hpp"
#include "navrec/linalg.hpp"
#include "navrec/operators.hpp"
#include "navrec/phantom.hpp"
#include "navrec/rng.hpp"
#include "navrec/threading.hpp"
#include "navrec/trajectory.hpp"

using namespace navrec;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f) {
    const auto t0 = Clock::now();
    f();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

double max_diff(const cd* a, const cd* b, std::size_t n) {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-24s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   max|diff| %.3e\n",
                name, serial_ms, parallel_ms,
                parallel_ms > 0.0 ? serial_ms / parallel_ms : 0.0, diff);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", max_threads());

    // shared scene: modest phantom so a full run stays in seconds
    PhantomConfig pc;
    pc.H = 64;
    pc.W = 64;
    pc.n_frames = 64;
    CMat X = generate_phantom(pc);
    CoilMapSet maps = generate_coil_maps(pc.H, pc.W, 4, 2);
    RadialTrajectory traj = golden_angle_trajectory(pc.n_frames, 8, 128);
    RadialSenseOperator A(maps, traj);

    {  // multi-frame NUFFT forward
        const std::size_t total = A.n_frames() * A.samples_per_frame();
        std::vector<cd> ys(total), yp(total);
        const double ts = time_ms([&] { ref::forward_all_serial(A, X, ys.data()); });
        const double tp = time_ms([&] { forward_all(A, X, yp.data()); });
        report("forward_all", ts, tp, max_diff(ys.data(), yp.data(), total));

        CMat xs, xp;
        const double as = time_ms([&] { xs = ref::adjoint_all_serial(A, ys.data()); });
        const double ap = time_ms([&] { xp = adjoint_all(A, yp.data()); });
        report("adjoint_all", as, ap, max_diff(xs.a.data(), xp.a.data(), xs.a.size()));
    }

    {  // dense complex matmul
        Rng rng(11);
        CMat B(512, 512), C(512, 512);
        for (auto& v : B.a) v = cd(rng.gaussian(), rng.gaussian());
        for (auto& v : C.a) v = cd(rng.gaussian(), rng.gaussian());
        CMat Ds, Dp;
        const double ts = time_ms([&] { Ds = ref::gemm_naive(B, C); });
        const double tp = time_ms([&] { Dp = matmul(B, C); });
        report("matmul 512x512", ts, tp, max_diff(Ds.a.data(), Dp.a.data(), Ds.a.size()));
    }

    {  // denoiser over every voxel profile
        auto dims = dae_layer_dims(X.cols);
        DaeParameters theta = dae_init(dims, 5);
        CMat Qs, Qp;
        const double ts = time_ms([&] { Qs = ref::dae_apply_casorati_serial(theta, X, 1.0); });
        const double tp = time_ms([&] { Qp = dae_apply_casorati(theta, X, 1.0); });
        report("dae_apply_casorati", ts, tp, max_diff(Qs.a.data(), Qp.a.data(), Qs.a.size()));
    }

    return 0;
}
