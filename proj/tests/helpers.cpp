#include "helpers.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>

#include "navrec/cli.hpp"
#include "navrec/fft.hpp"
#include "navrec/svd.hpp"

namespace testutil {

CMat truncate_rank(const CMat& X, std::size_t r) {
    navrec::SvdResult svd = navrec::truncated_svd(X, r);
    CMat us(svd.U.rows, r);
    for (std::size_t i = 0; i < svd.U.rows; ++i)
        for (std::size_t j = 0; j < r; ++j) us.at(i, j) = svd.U.at(i, j) * svd.s[j];
    return navrec::matmul(us, navrec::Op::None, svd.V, navrec::Op::ConjTrans);
}

void bandlimit_disc(CMat& X, std::size_t H, std::size_t W, double frac) {
    std::vector<cd> f(H * W), g(H * W);
    for (std::size_t t = 0; t < X.cols; ++t) {
        for (std::size_t i = 0; i < H * W; ++i) f[i] = X.at(i, t);
        navrec::fft2_centered(f.data(), g.data(), H, W, false);
        for (std::size_t r = 0; r < H; ++r)
            for (std::size_t c = 0; c < W; ++c) {
                const double ky = 2.0 * M_PI * (double(r) - double(H) / 2.0) / double(H);
                const double kx = 2.0 * M_PI * (double(c) - double(W) / 2.0) / double(W);
                if (std::hypot(kx, ky) > frac * M_PI) g[r * W + c] = cd(0, 0);
            }
        navrec::fft2_centered(g.data(), f.data(), H, W, true);
        for (std::size_t i = 0; i < H * W; ++i) X.at(i, t) = f[i];
    }
}

std::vector<cd> forward_measurements(const navrec::DynamicOperator& A, const CMat& X) {
    std::vector<cd> y(A.n_frames() * A.samples_per_frame());
    navrec::forward_all(A, X, y.data());
    return y;
}

TempDir::TempDir() {
    static std::atomic<unsigned> counter{0};
    const unsigned id = counter.fetch_add(1);
    path = std::filesystem::temp_directory_path() /
           ("navrec_test_" + std::to_string(::getpid()) + "_" + std::to_string(id));
    std::filesystem::create_directories(path);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
}

int cli(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back("navrec");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const auto& s : full) argv.push_back(s.c_str());
    return navrec::run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace testutil
