#pragma once

// Slow, obviously-correct reference implementations used only by tests and the
// benchmark harness. Everything here is written directly from the defining
// formulas (dense loops, no FFTs, no blocking, no OpenMP) so the optimized
// library can be checked against an independent code path.

#include <cstddef>
#include <vector>

#include "navrec/dae.hpp"
#include "navrec/operators.hpp"
#include "navrec/types.hpp"

namespace navrec::ref {

// Dense LU with partial pivoting; solves A x = b for square complex A.
std::vector<cd> lu_solve(CMat A, std::vector<cd> b);

struct SvdRef {
    CMat U;                 // p x k orthonormal columns (k = min(p, n))
    std::vector<double> s;  // descending
    CMat V;                 // n x k orthonormal columns
};

// One-sided Jacobi SVD (full, dense). Deterministic, cubic, fine up to a few
// thousand rows by a few hundred columns.
SvdRef svd_jacobi(const CMat& A, int max_sweeps = 60, double tol = 1e-12);

// Direct nonuniform DFT matching the gridder's convention:
//   forward: y[i] = sum_{p,q} img[p,q] exp(+i (ky[i](p - H/2) + kx[i](q - W/2)))
//   adjoint: img[p,q] = sum_i y[i] exp(-i (ky[i](p - H/2) + kx[i](q - W/2)))
void ndft_forward(const cd* img, std::size_t H, std::size_t W, const double* kx,
                  const double* ky, std::size_t nsamp, cd* y);
void ndft_adjoint(const cd* y, std::size_t H, std::size_t W, const double* kx,
                  const double* ky, std::size_t nsamp, cd* img);

// Direct centered DFTs (O(n^2)); unitary scaling, same sign convention as the
// library transforms.
void dft1_centered(const cd* in, cd* out, std::size_t n, bool inverse);
void dft2_centered(const cd* in, cd* out, std::size_t H, std::size_t W, bool inverse);

// Mean local SSIM by explicit per-window loops over a 2-D Gaussian mask.
double ssim_naive(const RMat& ref_img, const RMat& rec_img, std::size_t window,
                  double sigma, double k1, double k2);

// Dense correlation with a directly-built zero-mean Laplacian-of-Gaussian
// kernel, mirror (symmetric) padding.
RMat log_filter_dense(const RMat& img, std::size_t window, double sigma);

// Projections of a complex image: axis 0 sums over rows (profile along x),
// axis 1 sums over columns (profile along y).
std::vector<cd> axis_projection(const cd* img, std::size_t H, std::size_t W, int axis);

// Plain (i,j,k) dot-product matrix multiply, serial.
CMat gemm_naive(const CMat& A, const CMat& B);

// Serial twins of the frame-parallel kernels: identical arithmetic, no OpenMP.
void forward_all_serial(const DynamicOperator& A, const CMat& X, cd* Y);
CMat adjoint_all_serial(const DynamicOperator& A, const cd* Y);

// Per-voxel denoiser application through the single-vector code path.
CMat dae_apply_casorati_serial(const DaeParameters& theta, const CMat& X, double gamma);

}  // namespace navrec::ref
