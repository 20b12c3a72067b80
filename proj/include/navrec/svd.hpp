#pragma once

#include <cstddef>
#include <vector>

#include "navrec/types.hpp"

namespace navrec {

struct SvdResult {
    CMat U;                     // rows(A) x r, orthonormal columns
    std::vector<double> s;      // r singular values, descending
    CMat V;                     // cols(A) x r, orthonormal columns
};

struct TruncatedSvdOptions {
    int max_iter = 500;
    double tol = 1e-10;  // subspace angle change between iterations
};

// Leading-r singular triplets of a dense complex matrix by block orthogonal
// iteration on the smaller Gram side with Rayleigh-Ritz extraction. The block
// is internally oversampled a little so clustered singular values at the
// truncation boundary do not stall convergence of the leading subspace.
// Deterministic (fixed internal start). Throws DimensionError for r out of
// range, DegenerateInputError for all-zero input, NumericalError if the
// iteration cap is hit before the subspace settles.
SvdResult truncated_svd(const CMat& A, std::size_t r, TruncatedSvdOptions opts = {});

}  // namespace navrec
