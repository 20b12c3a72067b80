#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "navrec/acquisition.hpp"
#include "navrec/cg.hpp"
#include "navrec/operators.hpp"
#include "navrec/types.hpp"

namespace navrec {

struct SubspaceBasis {
    CMat V;  // n x r, orthonormal columns (top right singular vectors of Z)
    std::vector<double> singular_values;
    std::uint64_t source_hash = 0;  // FNV-1a of the navigator payload
};

// Temporal basis from the navigator matrix by truncated SVD. If r exceeds the
// numerical rank of Z the basis is completed with arbitrary orthonormal
// directions and a warning is appended (not fatal).
SubspaceBasis estimate_basis(const NavigatorMatrix& nav, std::size_t r,
                             std::vector<std::string>* warnings = nullptr);

// Apply the null-space projector N = I - V V^H to the rows of X (profiles):
// returns X N = X - (X V) V^H without materializing N.
CMat apply_nullspace(const CMat& X, const CMat& V);

struct SubspaceReconOptions {
    double cg_tol = 1e-8;
    int cg_iters = 200;
    const CMat* init = nullptr;    // optional warm start (Casorati shape)
    CgResult* stats = nullptr;     // filled with the achieved CG stats if non-null
};

// Hard subspace-constrained recovery: X = U V^H with U solving the normal
// equations of the composed operator in the U-domain (m x r unknowns).
CMat subspace_recon(const DynamicOperator& A, const cd* Y, const CMat& V,
                    const SubspaceReconOptions& opts = {});

// Penalized relaxation: minimize ||A(X) - Y||^2 + lambda ||X N||_F^2 over the
// full Casorati matrix. lambda = 0 is plain least squares (CG-SENSE); large
// lambda approaches the hard subspace solution.
CMat penalized_subspace_recon(const DynamicOperator& A, const cd* Y, const CMat& V,
                              double lambda, const SubspaceReconOptions& opts = {});

}  // namespace navrec
