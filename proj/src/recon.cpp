#include "navrec/recon.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "navrec/cg.hpp"
#include "navrec/linalg.hpp"
#include "navrec/trajectory.hpp"

namespace navrec {

void ReconConfig::validate() const {
    if (outer_iters < 1) throw ConfigError("ReconConfig: outer_iters must be >= 1");
    if (cg_iters < 1) throw ConfigError("ReconConfig: cg_iters must be >= 1");
    if (cg_tol <= 0.0) throw ConfigError("ReconConfig: cg_tol must be positive");
    if (early_stop < 0.0) throw ConfigError("ReconConfig: early_stop must be >= 0");
    // lambda < 0 selects the scale-relative default; otherwise any lambda >= 0 works
}

namespace {

// per-frame CG on (A^H A + lambda I) x = rhs, warm-started from X's columns.
// Returns the worst relative residual over frames. X holds the solution.
double x_update_inplace(const DynamicOperator& A, const CMat& AhY, const CMat* Q,
                        double lambda, int cg_iters, double cg_tol, CMat& X) {
    const std::size_t m = A.image_size();
    const std::size_t n = A.n_frames();
    const std::size_t spf = A.samples_per_frame();
    std::vector<double> res(n, 0.0);
    std::atomic<bool> failed{false};
    std::string err_msg;

#pragma omp parallel for schedule(dynamic)
    for (long long tt = 0; tt < static_cast<long long>(n); ++tt) {
        const auto t = static_cast<std::size_t>(tt);
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            std::vector<cd> rhs(m), x(m), samp(spf);
            for (std::size_t i = 0; i < m; ++i) {
                rhs[i] = AhY.at(i, t);
                if (lambda > 0.0 && Q) rhs[i] += lambda * Q->at(i, t);
                x[i] = X.at(i, t);
            }
            auto apply = [&](const cd* in, cd* out) {
                A.forward(t, in, samp.data());
                A.adjoint(t, samp.data(), out);
                if (lambda > 0.0)
                    for (std::size_t i = 0; i < m; ++i) out[i] += lambda * in[i];
            };
            CgResult cg = cg_solve(apply, rhs.data(), x.data(), m, cg_tol, cg_iters);
            if (!all_finite(x.data(), m) || !std::isfinite(cg.rel_residual))
                throw NumericalError("per-frame solve produced non-finite values");
            res[t] = cg.rel_residual;
            for (std::size_t i = 0; i < m; ++i) X.at(i, t) = x[i];
        } catch (const std::exception& e) {
#pragma omp critical(navrec_xupdate_err)
            {
                if (!failed.load()) err_msg = "frame " + std::to_string(t) + ": " + e.what();
                failed.store(true);
            }
        }
    }
    if (failed.load()) throw NumericalError("x_update: " + err_msg);
    return *std::max_element(res.begin(), res.end());
}

double data_term_value(const DynamicOperator& A, const CMat& X, const cd* Y) {
    const std::size_t total = A.n_frames() * A.samples_per_frame();
    std::vector<cd> AX(total);
    forward_all(A, X, AX.data());
    for (std::size_t i = 0; i < total; ++i) AX[i] -= Y[i];
    return det_norm2_sq(AX.data(), total);
}

CMat initial_guess(const DynamicOperator& A, const cd* Y, ReconInit init) {
    const std::size_t m = A.image_size();
    const std::size_t n = A.n_frames();
    if (init == ReconInit::Zeros) return CMat(m, n);
    const auto* radial = dynamic_cast<const RadialSenseOperator*>(&A);
    if (!radial)
        throw ConfigError("recon: zero-filled init needs a radial operator; use zeros init");
    return zero_filled_recon(*radial, Y, ramp_dcf(radial->trajectory()));
}

}  // namespace

CMat x_update(const DynamicOperator& A, const cd* Y, const CMat* Q, double lambda,
              int cg_iters, double cg_tol, const CMat* init, double* worst_residual) {
    const std::size_t m = A.image_size();
    const std::size_t n = A.n_frames();
    if (lambda < 0.0) throw ConfigError("x_update: lambda must be >= 0");
    if (lambda > 0.0 && !Q) throw ConfigError("x_update: Q required when lambda > 0");
    if (Q) require(Q->rows == m && Q->cols == n, "x_update: Q has wrong shape");

    CMat AhY = adjoint_all(A, Y);
    CMat X(m, n);
    if (init) {
        require(init->rows == m && init->cols == n, "x_update: init has wrong shape");
        X = *init;
    }
    const double worst = x_update_inplace(A, AhY, Q, lambda, cg_iters, cg_tol, X);
    if (worst_residual) *worst_residual = worst;
    return X;
}

ReconResult recon_dae(const DynamicOperator& A, const cd* Y, const DaeParameters& theta,
                      double gamma, const ReconConfig& cfg, const CMat* x0) {
    cfg.validate();
    const std::size_t m = A.image_size();
    const std::size_t n = A.n_frames();
    require(m > 0 && n > 0, "recon_dae: empty operator");

    ReconResult out;
    out.X = x0 ? *x0 : initial_guess(A, Y, cfg.init);
    require(out.X.rows == m && out.X.cols == n, "recon_dae: x0 has wrong shape");

    CMat AhY = adjoint_all(A, Y);
    out.lambda_used = cfg.lambda >= 0.0
                          ? cfg.lambda
                          : 0.1 * max_abs(AhY.a.data(), AhY.a.size()) / static_cast<double>(n);
    const double lambda = out.lambda_used;

    if (lambda == 0.0) {
        // degenerates to plain least squares; the denoiser is never invoked
        double worst = 0.0;
        try {
            worst = x_update_inplace(A, AhY, nullptr, 0.0, cfg.cg_iters, cfg.cg_tol, out.X);
        } catch (const NumericalError& e) {
            throw ReconError(e.what(), std::move(out));
        }
        out.data_terms.push_back(data_term_value(A, out.X, Y));
        out.prior_terms.push_back(0.0);
        out.cg_residuals.push_back(worst);
        return out;
    }

    CMat Q = dae_apply_casorati(theta, out.X, gamma);
    std::vector<cd> diff(m * n);
    for (int k = 0; k < cfg.outer_iters; ++k) {
        const CMat X_prev = out.X;
        double worst = 0.0;
        try {
            worst = x_update_inplace(A, AhY, &Q, lambda, cfg.cg_iters, cfg.cg_tol, out.X);
        } catch (const NumericalError& e) {
            out.X = X_prev;
            throw ReconError(e.what(), std::move(out));
        }
        Q = dae_apply_casorati(theta, out.X, gamma);

        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = out.X.a[i] - Q.a[i];
        out.data_terms.push_back(data_term_value(A, out.X, Y));
        out.prior_terms.push_back(lambda * det_norm2_sq(diff.data(), diff.size()));
        out.cg_residuals.push_back(worst);

        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = out.X.a[i] - X_prev.a[i];
        const double change = det_norm2(diff.data(), diff.size());
        const double base = det_norm2(X_prev.a.data(), X_prev.a.size());
        const double rel = change / (base > 0.0 ? base : 1.0);
        if (cfg.early_stop > 0.0 && rel < cfg.early_stop && k + 1 < cfg.outer_iters) {
            out.early_stopped = true;
            break;
        }
    }
    return out;
}

std::pair<double, double> objective_value(const CMat& X, const cd* Y,
                                          const DynamicOperator& A,
                                          const DaeParameters& theta, double gamma,
                                          double lambda) {
    require(X.rows == A.image_size() && X.cols == A.n_frames(),
            "objective_value: X has wrong shape");
    const double data = data_term_value(A, X, Y);
    if (lambda == 0.0) return {data, 0.0};
    CMat Q = dae_apply_casorati(theta, X, gamma);
    std::vector<cd> diff(X.a.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = X.a[i] - Q.a[i];
    return {data, lambda * det_norm2_sq(diff.data(), diff.size())};
}

}  // namespace navrec
