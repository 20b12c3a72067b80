#include "navrec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "navrec/errors.hpp"

namespace navrec {

namespace {

// Serial chunked accumulation: partials per chunk, then a fixed-order combine.
template <class F>
auto chunked_sum(std::size_t n, F&& term) {
    using R = decltype(term(std::size_t{0}));
    R total{};
    for (std::size_t base = 0; base < n; base += kDetChunk) {
        const std::size_t end = std::min(n, base + kDetChunk);
        R partial{};
        for (std::size_t i = base; i < end; ++i) partial += term(i);
        total += partial;
    }
    return total;
}

}  // namespace

cd det_dot(const cd* x, const cd* y, std::size_t n) {
    return chunked_sum(n, [&](std::size_t i) { return std::conj(x[i]) * y[i]; });
}

double det_dot(const double* x, const double* y, std::size_t n) {
    return chunked_sum(n, [&](std::size_t i) { return x[i] * y[i]; });
}

double det_norm2_sq(const cd* x, std::size_t n) {
    return chunked_sum(n, [&](std::size_t i) { return std::norm(x[i]); });
}

double det_norm2_sq(const double* x, std::size_t n) {
    return chunked_sum(n, [&](std::size_t i) { return x[i] * x[i]; });
}

double det_norm2(const cd* x, std::size_t n) { return std::sqrt(det_norm2_sq(x, n)); }

double max_abs(const cd* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

bool all_finite(const cd* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag())) return false;
    return true;
}

bool all_finite(const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i])) return false;
    return true;
}

void axpy(cd alpha, const cd* x, cd* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

CMat conj_transpose(const CMat& A) {
    CMat T(A.cols, A.rows);
    for (std::size_t r = 0; r < A.rows; ++r)
        for (std::size_t c = 0; c < A.cols; ++c) T.at(c, r) = std::conj(A.at(r, c));
    return T;
}

CMat matmul(const CMat& A, Op opA, const CMat& B, Op opB) {
    const CMat At = (opA == Op::ConjTrans) ? conj_transpose(A) : CMat();
    const CMat Bt = (opB == Op::ConjTrans) ? conj_transpose(B) : CMat();
    const CMat& lhs = (opA == Op::ConjTrans) ? At : A;
    const CMat& rhs = (opB == Op::ConjTrans) ? Bt : B;
    if (lhs.cols != rhs.rows)
        throw DimensionError("matmul: inner dimensions disagree (" + std::to_string(lhs.cols) +
                             " vs " + std::to_string(rhs.rows) + ")");
    CMat C(lhs.rows, rhs.cols);
    const std::size_t m = lhs.rows, k = lhs.cols, n = rhs.cols;
#pragma omp parallel for schedule(static)
    for (long long ri = 0; ri < static_cast<long long>(m); ++ri) {
        const std::size_t i = static_cast<std::size_t>(ri);
        cd* crow = C.row(i);
        const cd* arow = lhs.row(i);
        for (std::size_t kk = 0; kk < k; ++kk) {
            const cd aik = arow[kk];
            if (aik == cd(0.0, 0.0)) continue;
            const cd* brow = rhs.row(kk);
            for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return C;
}

std::vector<std::size_t> mgs_orthonormalize(CMat& V, double drop_tol) {
    std::vector<std::size_t> dropped;
    const std::size_t n = V.rows, r = V.cols;
    std::vector<cd> col(n);
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = V.at(i, j);
        const double in_norm = det_norm2(col.data(), n);
        for (std::size_t p = 0; p < j; ++p) {
            // project out column p (already normalized)
            cd proj(0.0, 0.0);
            for (std::size_t i = 0; i < n; ++i) proj += std::conj(V.at(i, p)) * col[i];
            for (std::size_t i = 0; i < n; ++i) col[i] -= proj * V.at(i, p);
        }
        const double nn = det_norm2(col.data(), n);
        if (in_norm == 0.0 || nn <= drop_tol * in_norm) {
            dropped.push_back(j);
            for (std::size_t i = 0; i < n; ++i) V.at(i, j) = cd(0.0, 0.0);
            continue;
        }
        const double inv = 1.0 / nn;
        for (std::size_t i = 0; i < n; ++i) V.at(i, j) = col[i] * inv;
    }
    return dropped;
}

EigResult hermitian_eig(const CMat& A, int max_sweeps, double tol) {
    if (A.rows != A.cols) throw DimensionError("hermitian_eig: matrix must be square");
    const std::size_t n = A.rows;
    CMat M = A;
    // enforce exact Hermitian symmetry of the working copy
    for (std::size_t i = 0; i < n; ++i) {
        M.at(i, i) = cd(M.at(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            cd v = 0.5 * (M.at(i, j) + std::conj(M.at(j, i)));
            M.at(i, j) = v;
            M.at(j, i) = std::conj(v);
        }
    }
    CMat V(n, n);
    for (std::size_t i = 0; i < n; ++i) V.at(i, i) = cd(1.0, 0.0);

    double base = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) base += std::norm(M.at(i, j));
    base = std::sqrt(base);
    if (base == 0.0) base = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(M.at(i, j));
        return std::sqrt(s);
    };

    bool converged = (n < 2) || off_norm() <= tol * base;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cd apq = M.at(p, q);
                const double abs_apq = std::abs(apq);
                if (abs_apq <= 1e-300) continue;
                const double app = M.at(p, p).real();
                const double aqq = M.at(q, q).real();
                // complex Jacobi rotation: phase to make the pivot real, then
                // a classic 2x2 symmetric rotation
                const cd phase = apq / abs_apq;
                const double tau = (aqq - app) / (2.0 * abs_apq);
                // smaller-magnitude root of t^2 - 2*tau*t - 1 = 0
                const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                // rotation U = [[c, -conj(s)], [s, c]] on the (p,q) plane,
                // with the pivot's phase folded into s so U^H M U zeroes M[p,q]
                const cd s = t * c * std::conj(phase);
                const cd sc = std::conj(s);

                // M <- U^H M  (rows p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const cd mpk = M.at(p, k);
                    const cd mqk = M.at(q, k);
                    M.at(p, k) = c * mpk + sc * mqk;
                    M.at(q, k) = -s * mpk + c * mqk;
                }
                // M <- M U  (columns p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const cd mkp = M.at(k, p);
                    const cd mkq = M.at(k, q);
                    M.at(k, p) = c * mkp + s * mkq;
                    M.at(k, q) = -sc * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cd vkp = V.at(k, p);
                    const cd vkq = V.at(k, q);
                    V.at(k, p) = c * vkp + s * vkq;
                    V.at(k, q) = -sc * vkp + c * vkq;
                }
            }
        }
        converged = off_norm() <= tol * base;
    }
    if (!converged)
        throw NumericalError("hermitian_eig: Jacobi sweeps did not converge");

    EigResult out;
    out.values.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = M.at(i, i).real();
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return diag[a] > diag[b]; });
    out.vectors = CMat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors.at(i, j) = V.at(i, order[j]);
    }
    return out;
}

}  // namespace navrec
