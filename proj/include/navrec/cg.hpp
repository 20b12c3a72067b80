#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "navrec/errors.hpp"
#include "navrec/linalg.hpp"
#include "navrec/types.hpp"

namespace navrec {

struct CgResult {
    int iterations = 0;
    double rel_residual = 0.0;  // ||rhs - A x|| / ||rhs|| actually achieved
    bool converged = false;
};

// Conjugate gradients for Hermitian positive (semi)definite systems A x = rhs.
// `apply` computes out = A * in for vectors of length n. x is used as the
// warm start and holds the solution on return. Stops when the residual norm
// drops below tol * ||rhs|| or after max_iter iterations; either way the
// achieved residual is reported. Throws NumericalError on NaN/Inf or if the
// operator turns out not to be positive definite along the search path.
template <class ApplyFn>
CgResult cg_solve(ApplyFn&& apply, const cd* rhs, cd* x, std::size_t n, double tol,
                  int max_iter) {
    CgResult out;
    const double rhs_norm = det_norm2(rhs, n);
    if (!std::isfinite(rhs_norm))
        throw NumericalError("cg_solve: right-hand side is not finite");
    if (rhs_norm == 0.0) {
        for (std::size_t i = 0; i < n; ++i) x[i] = cd(0.0, 0.0);
        out.converged = true;
        return out;
    }

    std::vector<cd> r(n), p(n), ap(n);
    apply(x, ap.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
    p = r;
    double rs_old = det_norm2_sq(r.data(), n);
    double res = std::sqrt(rs_old);
    if (!std::isfinite(res))
        throw NumericalError("cg_solve: initial residual is not finite");

    int it = 0;
    while (res > tol * rhs_norm && it < max_iter) {
        apply(p.data(), ap.data());
        const double p_ap = det_dot(p.data(), ap.data(), n).real();
        if (!std::isfinite(p_ap))
            throw NumericalError("cg_solve: non-finite curvature encountered");
        if (p_ap <= 0.0) {
            // numerically semi-definite direction; the current iterate is the
            // best we can certify
            break;
        }
        const double alpha = rs_old / p_ap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rs_new = det_norm2_sq(r.data(), n);
        if (!std::isfinite(rs_new))
            throw NumericalError("cg_solve: residual diverged to NaN/Inf");
        const double beta = rs_new / rs_old;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rs_old = rs_new;
        res = std::sqrt(rs_new);
        ++it;
    }

    out.iterations = it;
    out.rel_residual = res / rhs_norm;
    out.converged = res <= tol * rhs_norm;
    return out;
}

}  // namespace navrec
