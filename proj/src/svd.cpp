#include "navrec/svd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "navrec/errors.hpp"
#include "navrec/linalg.hpp"
#include "navrec/rng.hpp"

namespace navrec {

namespace {

void reseed_dropped(CMat& V, const std::vector<std::size_t>& dropped, Rng& rng) {
    for (std::size_t j : dropped)
        for (std::size_t i = 0; i < V.rows; ++i)
            V.at(i, j) = cd(rng.gaussian(), rng.gaussian());
}

CMat orthonormal_block(CMat V, Rng& rng) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        auto dropped = mgs_orthonormalize(V);
        if (dropped.empty()) return V;
        if (attempt == 3)
            throw NumericalError("truncated_svd: could not build an orthonormal block");
        reseed_dropped(V, dropped, rng);
    }
    return V;  // unreachable
}

}  // namespace

SvdResult truncated_svd(const CMat& A, std::size_t r, TruncatedSvdOptions opts) {
    const std::size_t p = A.rows, n = A.cols;
    if (p == 0 || n == 0) throw DimensionError("truncated_svd: empty matrix");
    if (r < 1 || r > std::min(p, n))
        throw DimensionError("truncated_svd: rank " + std::to_string(r) +
                             " out of range for " + std::to_string(p) + "x" +
                             std::to_string(n));
    if (max_abs(A.a.data(), A.a.size()) == 0.0)
        throw DegenerateInputError("truncated_svd: input matrix is identically zero");

    // iterate on the side with fewer columns; if the input is wide, work on
    // its conjugate transpose and swap factors at the end
    const bool swapped = p < n;
    const CMat M = swapped ? conj_transpose(A) : A;
    const std::size_t ns = M.cols;

    const std::size_t q = std::min(r + 10, ns);  // oversampled block
    Rng rng(0x5eedb0a7dull);
    CMat V(ns, q);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < q; ++j) V.at(i, j) = cd(rng.gaussian(), rng.gaussian());
    V = orthonormal_block(std::move(V), rng);

    CMat W;                 // M * V, kept for the final extraction
    CMat ritz_vectors;      // eigenvectors of T = W^H W
    std::vector<double> ritz_values;
    CMat vr_prev;
    std::size_t eff_prev = 0;
    bool converged = false;

    for (int it = 0; it < opts.max_iter; ++it) {
        W = matmul(M, V);
        const CMat T = matmul(W, Op::ConjTrans, W, Op::None);
        EigResult eig = hermitian_eig(T);
        ritz_vectors = std::move(eig.vectors);
        ritz_values = std::move(eig.values);

        // leading-r Ritz basis on the V side
        CMat Er(q, r);
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j < r; ++j) Er.at(i, j) = ritz_vectors.at(i, j);
        CMat vr = matmul(V, Er);

        // directions with negligible Ritz values sit in the numerical null
        // space and never settle; judge convergence on the significant ones
        const double val_floor = std::max(0.0, ritz_values[0]) * 1e-24;
        std::size_t eff = 0;
        while (eff < r && ritz_values[eff] > val_floor) ++eff;
        if (eff == 0) eff = 1;

        if (vr_prev.rows == vr.rows && eff == eff_prev) {
            CMat ve(vr.rows, eff), pe(vr.rows, eff);
            for (std::size_t i = 0; i < vr.rows; ++i)
                for (std::size_t j = 0; j < eff; ++j) {
                    ve.at(i, j) = vr.at(i, j);
                    pe.at(i, j) = vr_prev.at(i, j);
                }
            const CMat P = matmul(pe, Op::ConjTrans, ve, Op::None);
            const CMat proj = matmul(pe, P);
            double diff = 0.0;
            for (std::size_t i = 0; i < ve.size(); ++i) diff += std::norm(ve.a[i] - proj.a[i]);
            if (std::sqrt(diff / static_cast<double>(eff)) < opts.tol) {
                vr_prev = std::move(vr);
                converged = true;
                break;
            }
        }
        vr_prev = std::move(vr);
        eff_prev = eff;

        V = orthonormal_block(matmul(M, Op::ConjTrans, W, Op::None), rng);
    }
    if (!converged)
        throw NumericalError("truncated_svd: subspace iteration did not converge within " +
                             std::to_string(opts.max_iter) + " iterations");

    // singular values from the Ritz values of the final W
    std::vector<double> sigma(r);
    for (std::size_t j = 0; j < r; ++j) sigma[j] = std::sqrt(std::max(0.0, ritz_values[j]));

    // left factor: M * vr = W * Er, column-scaled by 1/sigma
    CMat Er(q, r);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < r; ++j) Er.at(i, j) = ritz_vectors.at(i, j);
    CMat Um = matmul(W, Er);
    const double sigma_floor = (sigma[0] > 0.0 ? sigma[0] : 1.0) * 1e-14;
    std::vector<std::size_t> null_cols;
    for (std::size_t j = 0; j < r; ++j) {
        if (sigma[j] > sigma_floor) {
            const double inv = 1.0 / sigma[j];
            for (std::size_t i = 0; i < Um.rows; ++i) Um.at(i, j) *= inv;
        } else {
            null_cols.push_back(j);
        }
    }
    if (!null_cols.empty()) {
        // zero singular values: complete with any orthonormal directions
        reseed_dropped(Um, null_cols, rng);
        Um = orthonormal_block(std::move(Um), rng);
    }

    SvdResult out;
    out.s = std::move(sigma);
    if (swapped) {
        out.U = std::move(vr_prev);
        out.V = std::move(Um);
    } else {
        out.U = std::move(Um);
        out.V = std::move(vr_prev);
    }
    return out;
}

}  // namespace navrec
