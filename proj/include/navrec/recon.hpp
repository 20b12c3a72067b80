#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "navrec/dae.hpp"
#include "navrec/errors.hpp"
#include "navrec/operators.hpp"
#include "navrec/types.hpp"

namespace navrec {

enum class ReconInit { ZeroFilled, Zeros };

struct ReconConfig {
    double lambda = -1.0;      // < 0 means auto: 0.1 * max|A^H Y| / n_frames
    int outer_iters = 10;
    int cg_iters = 30;
    double cg_tol = 1e-6;
    double early_stop = 1e-4;  // stop when rel frame-to-frame change drops below; 0 disables
    ReconInit init = ReconInit::ZeroFilled;

    void validate() const;
};

struct ReconResult {
    CMat X;                            // recovered Casorati matrix
    std::vector<double> data_terms;    // ||A(X)-Y||^2 after each outer iteration
    std::vector<double> prior_terms;   // lambda*||X - Q||^2 after each outer iteration
    std::vector<double> cg_residuals;  // worst per-frame relative residual per outer iter
    double lambda_used = 0.0;
    bool early_stopped = false;
};

// Thrown when an inner CG solve breaks down; carries whatever was recovered so far.
struct ReconError : NumericalError {
    ReconError(const std::string& msg, ReconResult partial_)
        : NumericalError(msg), partial(std::move(partial_)) {}
    ReconResult partial;
};

// One data-consistency step: solve (A^H A + lambda I) X = A^H Y + lambda Q by
// per-frame CG (the system decouples across frames). Q may be null when
// lambda == 0. init (optional) seeds the CG warm start.
CMat x_update(const DynamicOperator& A, const cd* Y, const CMat* Q, double lambda,
              int cg_iters, double cg_tol, const CMat* init = nullptr,
              double* worst_residual = nullptr);

// Alternating minimization with the denoiser residual prior: X-step as above,
// then Q <- denoised X. x0 (optional) overrides cfg.init.
ReconResult recon_dae(const DynamicOperator& A, const cd* Y, const DaeParameters& theta,
                      double gamma, const ReconConfig& cfg, const CMat* x0 = nullptr);

// Both objective pieces, reported separately: {||A(X)-Y||^2, lambda*||X - D(X)||^2}.
// The denoiser is not invoked when lambda == 0.
std::pair<double, double> objective_value(const CMat& X, const cd* Y,
                                          const DynamicOperator& A,
                                          const DaeParameters& theta, double gamma,
                                          double lambda);

}  // namespace navrec
