#include "navrec/priors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <vector>

#include "navrec/cg.hpp"
#include "navrec/errors.hpp"
#include "navrec/hash.hpp"
#include "navrec/linalg.hpp"
#include "navrec/rng.hpp"
#include "navrec/svd.hpp"

namespace navrec {

SubspaceBasis estimate_basis(const NavigatorMatrix& nav, std::size_t r,
                             std::vector<std::string>* warnings) {
    const CMat& Z = nav.Z;
    require(Z.rows > 0 && Z.cols > 0, "estimate_basis: empty navigator matrix");
    require(r >= 1 && r <= Z.cols, "estimate_basis: basis size must be in [1, n_frames]");

    const std::size_t k = std::min(r, std::min(Z.rows, Z.cols));
    SvdResult svd = truncated_svd(Z, k);

    SubspaceBasis out;
    out.V = CMat(Z.cols, r);
    out.singular_values = svd.s;
    out.source_hash = fnv1a64(Z.a.data(), Z.a.size() * sizeof(cd));
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < Z.cols; ++i) out.V.at(i, j) = svd.V.at(i, j);

    // numerical rank relative to the leading singular value
    std::size_t rank = 0;
    const double cutoff = svd.s.empty() ? 0.0 : svd.s[0] * 1e-10;
    for (double s : svd.s)
        if (s > cutoff) ++rank;

    if (rank < r) {
        if (warnings)
            warnings->push_back("estimate_basis: requested " + std::to_string(r) +
                                " components but numerical rank is " + std::to_string(rank) +
                                "; trailing directions are arbitrary");
        // pad any missing columns with random directions, then re-orthonormalize
        if (k < r) {
            Rng rng(0xba515f111ull);
            for (std::size_t j = k; j < r; ++j)
                for (std::size_t i = 0; i < Z.cols; ++i)
                    out.V.at(i, j) = cd(rng.gaussian(), rng.gaussian());
            auto dropped = mgs_orthonormalize(out.V);
            if (!dropped.empty())
                throw NumericalError("estimate_basis: failed to complete basis to full size");
        }
    }
    return out;
}

CMat apply_nullspace(const CMat& X, const CMat& V) {
    require(X.cols == V.rows, "apply_nullspace: frame-count mismatch");
    CMat C = matmul(X, V);                              // m x r
    CMat P = matmul(C, Op::None, V, Op::ConjTrans);     // m x n, the V V^H part
    CMat out(X.rows, X.cols);
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = X.a[i] - P.a[i];
    return out;
}

namespace {

// out = A^H(A(X)) accumulated over all frames; scratch holds one frame of samples
CMat normal_apply(const DynamicOperator& A, const CMat& X) {
    const std::size_t n = A.n_frames();
    const std::size_t spf = A.samples_per_frame();
    std::vector<cd> Y(n * spf);
    forward_all(A, X, Y.data());
    return adjoint_all(A, Y.data());
}

}  // namespace

CMat subspace_recon(const DynamicOperator& A, const cd* Y, const CMat& V,
                    const SubspaceReconOptions& opts) {
    const std::size_t m = A.image_size();
    const std::size_t n = A.n_frames();
    const std::size_t r = V.cols;
    require(V.rows == n, "subspace_recon: basis rows must equal n_frames");
    require(r >= 1, "subspace_recon: empty basis");

    // rhs = A^H(Y) V, unknowns U (m x r); G(U) = A^H(A(U V^H)) V
    CMat AhY = adjoint_all(A, Y);
    CMat rhs = matmul(AhY, V);

    auto applyG = [&](const cd* in, cd* out) {
        CMat U(m, r);
        std::copy(in, in + m * r, U.a.begin());
        CMat X = matmul(U, Op::None, V, Op::ConjTrans);
        CMat AhAX = normal_apply(A, X);
        CMat G = matmul(AhAX, V);
        std::copy(G.a.begin(), G.a.end(), out);
    };

    CMat U(m, r);
    if (opts.init) {
        require(opts.init->rows == m && opts.init->cols == n,
                "subspace_recon: init has wrong shape");
        U = matmul(*opts.init, V);
    }
    CgResult st = cg_solve(applyG, rhs.a.data(), U.a.data(), m * r, opts.cg_tol, opts.cg_iters);
    if (opts.stats) *opts.stats = st;
    return matmul(U, Op::None, V, Op::ConjTrans);
}

CMat penalized_subspace_recon(const DynamicOperator& A, const cd* Y, const CMat& V,
                              double lambda, const SubspaceReconOptions& opts) {
    const std::size_t m = A.image_size();
    const std::size_t n = A.n_frames();
    require(V.rows == n, "penalized_subspace_recon: basis rows must equal n_frames");
    if (lambda < 0.0) throw ConfigError("penalized_subspace_recon: lambda must be >= 0");

    CMat rhs = adjoint_all(A, Y);

    auto applyP = [&](const cd* in, cd* out) {
        CMat X(m, n);
        std::copy(in, in + m * n, X.a.begin());
        CMat AhAX = normal_apply(A, X);
        if (lambda > 0.0) {
            CMat NX = apply_nullspace(X, V);
            for (std::size_t i = 0; i < AhAX.a.size(); ++i) AhAX.a[i] += lambda * NX.a[i];
        }
        std::copy(AhAX.a.begin(), AhAX.a.end(), out);
    };

    CMat X(m, n);
    if (opts.init) {
        require(opts.init->rows == m && opts.init->cols == n,
                "penalized_subspace_recon: init has wrong shape");
        X = *opts.init;
    }
    CgResult st = cg_solve(applyP, rhs.a.data(), X.a.data(), m * n, opts.cg_tol, opts.cg_iters);
    if (opts.stats) *opts.stats = st;
    return X;
}

}  // namespace navrec
