#include "navref.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "navrec/errors.hpp"

namespace navrec::ref {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<cd> lu_solve(CMat A, std::vector<cd> b) {
    const std::size_t n = A.rows;
    if (A.cols != n || b.size() != n) throw DimensionError("lu_solve: shape mismatch");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(A.at(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(A.at(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) throw NumericalError("lu_solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A.at(k, j), A.at(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cd f = A.at(i, k) / A.at(k, k);
            A.at(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) A.at(i, j) -= f * A.at(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<cd> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        cd acc = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= A.at(ii, j) * x[j];
        x[ii] = acc / A.at(ii, ii);
    }
    return x;
}

SvdRef svd_jacobi(const CMat& A, int max_sweeps, double tol) {
    const bool swapped = A.rows < A.cols;
    CMat M = A;
    if (swapped) {
        // run on the conjugate transpose so columns are the short dimension
        CMat T(A.cols, A.rows);
        for (std::size_t i = 0; i < A.rows; ++i)
            for (std::size_t j = 0; j < A.cols; ++j) T.at(j, i) = std::conj(A.at(i, j));
        M = std::move(T);
    }
    const std::size_t p = M.rows, n = M.cols;
    if (p == 0 || n == 0) throw DimensionError("svd_jacobi: empty matrix");

    CMat V(n, n);
    for (std::size_t i = 0; i < n; ++i) V.at(i, i) = cd(1.0, 0.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool any = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double a = 0.0, b2 = 0.0;
                cd g(0.0, 0.0);
                for (std::size_t r = 0; r < p; ++r) {
                    const cd ci = M.at(r, i), cj = M.at(r, j);
                    a += std::norm(ci);
                    b2 += std::norm(cj);
                    g += std::conj(ci) * cj;
                }
                const double ga = std::abs(g);
                if (ga <= tol * std::sqrt(a * b2) || ga == 0.0) continue;
                any = true;

                const cd phase = g / ga;  // e^{i phi}
                const double tau = (b2 - a) / (2.0 * ga);
                // smaller-magnitude root of t^2 + 2*tau*t - 1 = 0
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // [ci', cj'] = [ci, cj] * [[c, s*phase], [-s*conj(phase), c]]
                const cd sp = s * phase;
                const cd spc = s * std::conj(phase);
                for (std::size_t r = 0; r < p; ++r) {
                    const cd ci = M.at(r, i), cj = M.at(r, j);
                    M.at(r, i) = c * ci - spc * cj;
                    M.at(r, j) = sp * ci + c * cj;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const cd vi = V.at(r, i), vj = V.at(r, j);
                    V.at(r, i) = c * vi - spc * vj;
                    V.at(r, j) = sp * vi + c * vj;
                }
            }
        }
        if (!any) break;
        if (sweep == max_sweeps - 1)
            throw NumericalError("svd_jacobi: no convergence within sweep budget");
    }

    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < p; ++r) acc += std::norm(M.at(r, j));
        sig[j] = std::sqrt(acc);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

    const std::size_t k = std::min(p, n);
    SvdRef out;
    out.s.resize(k);
    out.U = CMat(p, k);
    out.V = CMat(n, k);
    for (std::size_t jj = 0; jj < k; ++jj) {
        const std::size_t j = order[jj];
        out.s[jj] = sig[j];
        for (std::size_t r = 0; r < n; ++r) out.V.at(r, jj) = V.at(r, j);
        if (sig[j] > 0.0)
            for (std::size_t r = 0; r < p; ++r) out.U.at(r, jj) = M.at(r, j) / sig[j];
    }
    if (swapped) std::swap(out.U, out.V);
    return out;
}

void ndft_forward(const cd* img, std::size_t H, std::size_t W, const double* kx,
                  const double* ky, std::size_t nsamp, cd* y) {
    for (std::size_t i = 0; i < nsamp; ++i) {
        cd acc(0.0, 0.0);
        for (std::size_t p = 0; p < H; ++p) {
            const double cy = static_cast<double>(p) - static_cast<double>(H) / 2.0;
            for (std::size_t q = 0; q < W; ++q) {
                const double cx = static_cast<double>(q) - static_cast<double>(W) / 2.0;
                const double ph = ky[i] * cy + kx[i] * cx;
                acc += img[p * W + q] * cd(std::cos(ph), std::sin(ph));
            }
        }
        y[i] = acc;
    }
}

void ndft_adjoint(const cd* y, std::size_t H, std::size_t W, const double* kx,
                  const double* ky, std::size_t nsamp, cd* img) {
    for (std::size_t p = 0; p < H; ++p) {
        const double cy = static_cast<double>(p) - static_cast<double>(H) / 2.0;
        for (std::size_t q = 0; q < W; ++q) {
            const double cx = static_cast<double>(q) - static_cast<double>(W) / 2.0;
            cd acc(0.0, 0.0);
            for (std::size_t i = 0; i < nsamp; ++i) {
                const double ph = ky[i] * cy + kx[i] * cx;
                acc += y[i] * cd(std::cos(ph), -std::sin(ph));
            }
            img[p * W + q] = acc;
        }
    }
}

void dft1_centered(const cd* in, cd* out, std::size_t n, bool inverse) {
    const double sgn = inverse ? 1.0 : -1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double h = static_cast<double>(n) / 2.0;
    std::vector<cd> tmp(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc(0.0, 0.0);
        for (std::size_t u = 0; u < n; ++u) {
            const double ph = sgn * 2.0 * kPi * (static_cast<double>(u) - h) *
                              (static_cast<double>(k) - h) / static_cast<double>(n);
            acc += in[u] * cd(std::cos(ph), std::sin(ph));
        }
        tmp[k] = acc * scale;
    }
    std::copy(tmp.begin(), tmp.end(), out);
}

void dft2_centered(const cd* in, cd* out, std::size_t H, std::size_t W, bool inverse) {
    const double sgn = inverse ? 1.0 : -1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(H * W));
    const double hh = static_cast<double>(H) / 2.0, hw = static_cast<double>(W) / 2.0;
    std::vector<cd> tmp(H * W);
    for (std::size_t u = 0; u < H; ++u)
        for (std::size_t v = 0; v < W; ++v) {
            cd acc(0.0, 0.0);
            for (std::size_t p = 0; p < H; ++p)
                for (std::size_t q = 0; q < W; ++q) {
                    const double ph =
                        sgn * 2.0 * kPi *
                        ((static_cast<double>(p) - hh) * (static_cast<double>(u) - hh) /
                             static_cast<double>(H) +
                         (static_cast<double>(q) - hw) * (static_cast<double>(v) - hw) /
                             static_cast<double>(W));
                    acc += in[p * W + q] * cd(std::cos(ph), std::sin(ph));
                }
            tmp[u * W + v] = acc * scale;
        }
    std::copy(tmp.begin(), tmp.end(), out);
}

double ssim_naive(const RMat& ref_img, const RMat& rec_img, std::size_t window,
                  double sigma, double k1, double k2) {
    if (ref_img.rows != rec_img.rows || ref_img.cols != rec_img.cols)
        throw DimensionError("ssim_naive: shape mismatch");
    const std::size_t w = window;
    const std::size_t H = ref_img.rows, W = ref_img.cols;
    if (H < w || W < w) throw DimensionError("ssim_naive: image smaller than window");

    double L = ref_img.a[0];
    for (double v : ref_img.a) L = std::max(L, v);
    const double c1 = (k1 * L) * (k1 * L);
    const double c2 = (k2 * L) * (k2 * L);

    // full 2-D mask, normalized by its own total
    RMat mask(w, w);
    const double c = (static_cast<double>(w) - 1.0) / 2.0;
    double total = 0.0;
    for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            const double dy = static_cast<double>(i) - c;
            const double dx = static_cast<double>(j) - c;
            mask.at(i, j) = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            total += mask.at(i, j);
        }
    for (double& v : mask.a) v /= total;

    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r + w <= H; ++r)
        for (std::size_t cc = 0; cc + w <= W; ++cc) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (std::size_t i = 0; i < w; ++i)
                for (std::size_t j = 0; j < w; ++j) {
                    const double wv = mask.at(i, j);
                    const double x = ref_img.at(r + i, cc + j);
                    const double y = rec_img.at(r + i, cc + j);
                    mx += wv * x;
                    my += wv * y;
                    sxx += wv * x * x;
                    syy += wv * y * y;
                    sxy += wv * x * y;
                }
            const double vx = sxx - mx * mx;
            const double vy = syy - my * my;
            const double cxy = sxy - mx * my;
            acc += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                   ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return acc / static_cast<double>(count);
}

namespace {

std::size_t mirror(long long i, std::size_t n) {
    const long long period = 2 * static_cast<long long>(n);
    long long j = i % period;
    if (j < 0) j += period;
    if (j >= static_cast<long long>(n)) j = period - 1 - j;
    return static_cast<std::size_t>(j);
}

}  // namespace

RMat log_filter_dense(const RMat& img, std::size_t window, double sigma) {
    const std::size_t w = window;
    const double s2 = sigma * sigma;
    const double c = (static_cast<double>(w) - 1.0) / 2.0;

    RMat h(w, w);
    double total = 0.0;
    for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            const double dy = static_cast<double>(i) - c;
            const double dx = static_cast<double>(j) - c;
            h.at(i, j) = std::exp(-(dy * dy + dx * dx) / (2.0 * s2));
            total += h.at(i, j);
        }
    RMat k1m(w, w);
    double k1_sum = 0.0;
    for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            const double dy = static_cast<double>(i) - c;
            const double dx = static_cast<double>(j) - c;
            k1m.at(i, j) = h.at(i, j) / total * (dy * dy + dx * dx - 2.0 * s2) / (s2 * s2);
            k1_sum += k1m.at(i, j);
        }
    const double mean = k1_sum / static_cast<double>(w * w);
    for (double& v : k1m.a) v -= mean;

    const long long rad = (static_cast<long long>(w) - 1) / 2;
    RMat out(img.rows, img.cols);
    for (std::size_t r = 0; r < img.rows; ++r)
        for (std::size_t cc = 0; cc < img.cols; ++cc) {
            double acc = 0.0;
            for (std::size_t i = 0; i < w; ++i)
                for (std::size_t j = 0; j < w; ++j) {
                    const std::size_t rr =
                        mirror(static_cast<long long>(r) + static_cast<long long>(i) - rad,
                               img.rows);
                    const std::size_t sc =
                        mirror(static_cast<long long>(cc) + static_cast<long long>(j) - rad,
                               img.cols);
                    acc += k1m.at(i, j) * img.at(rr, sc);
                }
            out.at(r, cc) = acc;
        }
    return out;
}

std::vector<cd> axis_projection(const cd* img, std::size_t H, std::size_t W, int axis) {
    if (axis == 0) {
        std::vector<cd> out(W, cd(0.0, 0.0));
        for (std::size_t p = 0; p < H; ++p)
            for (std::size_t q = 0; q < W; ++q) out[q] += img[p * W + q];
        return out;
    }
    std::vector<cd> out(H, cd(0.0, 0.0));
    for (std::size_t p = 0; p < H; ++p)
        for (std::size_t q = 0; q < W; ++q) out[p] += img[p * W + q];
    return out;
}

CMat gemm_naive(const CMat& A, const CMat& B) {
    if (A.cols != B.rows) throw DimensionError("gemm_naive: inner dims differ");
    CMat C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < B.cols; ++j) {
            cd acc(0.0, 0.0);
            for (std::size_t k = 0; k < A.cols; ++k) acc += A.at(i, k) * B.at(k, j);
            C.at(i, j) = acc;
        }
    return C;
}

void forward_all_serial(const DynamicOperator& A, const CMat& X, cd* Y) {
    const std::size_t m = A.image_size();
    const std::size_t spf = A.samples_per_frame();
    if (X.rows != m || X.cols != A.n_frames())
        throw DimensionError("forward_all_serial: shape mismatch");
    std::vector<cd> x(m);
    for (std::size_t t = 0; t < A.n_frames(); ++t) {
        for (std::size_t i = 0; i < m; ++i) x[i] = X.at(i, t);
        A.forward(t, x.data(), Y + t * spf);
    }
}

CMat adjoint_all_serial(const DynamicOperator& A, const cd* Y) {
    const std::size_t m = A.image_size();
    const std::size_t spf = A.samples_per_frame();
    CMat X(m, A.n_frames());
    std::vector<cd> x(m);
    for (std::size_t t = 0; t < A.n_frames(); ++t) {
        A.adjoint(t, Y + t * spf, x.data());
        for (std::size_t i = 0; i < m; ++i) X.at(i, t) = x[i];
    }
    return X;
}

CMat dae_apply_casorati_serial(const DaeParameters& theta, const CMat& X, double gamma) {
    const std::size_t n = X.cols;
    if (theta.input_width() != n)
        throw DimensionError("dae_apply_casorati_serial: width mismatch");
    if (gamma <= 0.0) throw DimensionError("dae_apply_casorati_serial: gamma must be > 0");
    CMat out(X.rows, X.cols);
    std::vector<double> re(n), im(n);
    for (std::size_t r = 0; r < X.rows; ++r) {
        for (std::size_t t = 0; t < n; ++t) {
            re[t] = X.at(r, t).real() / gamma;
            im[t] = X.at(r, t).imag() / gamma;
        }
        const std::vector<double> ore = dae_apply(theta, re);
        const std::vector<double> oim = dae_apply(theta, im);
        for (std::size_t t = 0; t < n; ++t)
            out.at(r, t) = cd(ore[t] * gamma, oim[t] * gamma);
    }
    return out;
}

}  // namespace navrec::ref
