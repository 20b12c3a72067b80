#pragma once

#include <cstddef>
#include <vector>

#include "navrec/types.hpp"

namespace navrec {

// Deterministic dot products and norms. Sums are accumulated per fixed-size
// chunk and the chunk partials are combined serially, so the result does not
// depend on thread count or scheduling (no OpenMP reductions anywhere).
inline constexpr std::size_t kDetChunk = 4096;

cd det_dot(const cd* x, const cd* y, std::size_t n);    // conj(x) . y
double det_dot(const double* x, const double* y, std::size_t n);
double det_norm2_sq(const cd* x, std::size_t n);
double det_norm2_sq(const double* x, std::size_t n);
double det_norm2(const cd* x, std::size_t n);
double max_abs(const cd* x, std::size_t n);

inline cd det_dot(const std::vector<cd>& x, const std::vector<cd>& y) {
    return det_dot(x.data(), y.data(), x.size());
}
inline double det_norm2(const std::vector<cd>& x) { return det_norm2(x.data(), x.size()); }

bool all_finite(const cd* x, std::size_t n);
bool all_finite(const double* x, std::size_t n);

// y += alpha * x
void axpy(cd alpha, const cd* x, cd* y, std::size_t n);

enum class Op { None, ConjTrans };

// C = op(A) * op(B). Row-parallel ikj product; the k-accumulation order per
// output element is fixed, which keeps results bit-identical across thread
// counts. Transposed operands are materialized first (the matrices involved
// here are small enough that the copy is irrelevant).
CMat matmul(const CMat& A, Op opA, const CMat& B, Op opB);
inline CMat matmul(const CMat& A, const CMat& B) { return matmul(A, Op::None, B, Op::None); }

CMat conj_transpose(const CMat& A);

// Modified Gram-Schmidt orthonormalization of the columns of V (in place).
// Columns that cancel numerically (norm below drop_tol relative to the column
// input norm) are reported back via the return vector so callers can reseed
// them. Returns indices of dropped columns.
std::vector<std::size_t> mgs_orthonormalize(CMat& V, double drop_tol = 1e-12);

struct EigResult {
    std::vector<double> values;  // descending
    CMat vectors;                // columns match values
};

// Dense Hermitian eigendecomposition via cyclic Jacobi rotations. Intended for
// small matrices (coil covariance, Rayleigh-Ritz blocks). Throws
// NumericalError if off-diagonal mass fails to vanish within the sweep cap and
// DimensionError for non-square input.
EigResult hermitian_eig(const CMat& A, int max_sweeps = 60, double tol = 1e-13);

}  // namespace navrec
