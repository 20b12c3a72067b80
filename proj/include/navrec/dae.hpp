#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "navrec/acquisition.hpp"
#include "navrec/errors.hpp"
#include "navrec/types.hpp"

namespace navrec {

// Fully connected denoising autoencoder: four weight layers
// [n -> h -> b -> h -> n], ReLU on the three hidden activations, identity
// output. Weights are stored input-major (dims[l] x dims[l+1]) so the forward
// pass is a plain row-parallel product.
struct DaeParameters {
    std::vector<std::size_t> dims;          // [n, h, b, h, n]
    std::vector<RMat> w;                    // 4 matrices
    std::vector<std::vector<double>> bias;  // 4 vectors

    std::size_t input_width() const { return dims.empty() ? 0 : dims.front(); }
    std::size_t n_params() const;
};

// Layer widths for input size n: bottleneck 50 when n == 400, otherwise
// round(n/8) (at least 1); hidden width halfway between input and bottleneck,
// rounded up. bottleneck_override = 0 keeps the rule.
std::vector<std::size_t> dae_layer_dims(std::size_t n, std::size_t bottleneck_override = 0);

// He-uniform initialization (limit sqrt(6/fan_in) per layer), biases zero.
DaeParameters dae_init(const std::vector<std::size_t>& dims, std::uint64_t seed);

struct TrainingSet {
    std::size_t n = 0;                         // vector length (frames)
    std::vector<std::vector<double>> vectors;  // normalized: max |entry| = 1
    double gamma = 1.0;                        // the normalization scale
};

// Realification of Z: each complex row contributes its real part and its
// imaginary part as two separate training vectors; gamma is the global max
// absolute entry before normalization.
TrainingSet prepare_training_vectors(const NavigatorMatrix& nav);

struct TrainConfig {
    std::vector<double> noise_levels = {0.10, 0.05, 0.03, 0.01, 0.007, 0.005, 0.003, 0.001};
    // sampling weights per level: lower noise levels get more realizations
    std::vector<int> realizations_per_level = {1, 1, 2, 2, 4, 4, 8, 8};
    int epochs = 500;
    int batch = 64;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 7;
    std::size_t bottleneck_override = 0;

    void validate() const;  // throws ConfigError
};

struct TrainResult {
    DaeParameters theta;  // parameters at the best validation epoch
    double gamma = 1.0;
    std::vector<double> train_loss;  // per epoch, mean squared error per entry
    std::vector<double> val_loss;    // per epoch, on a fixed corrupted val set
    int best_epoch = -1;
    std::vector<std::size_t> val_indices;  // held-out rows of the training set
    std::vector<std::string> warnings;
};

// Multi-noise-level self-training. Every epoch regenerates the corrupted
// inputs: each training vector draws one noise level (probability
// proportional to realizations_per_level) and a fresh Gaussian realization,
// so the weighted multi-level/multi-realization objective is sampled without
// materializing all combinations. 10% of the vectors (at least one, kept via
// a seeded shuffle) are held out; validation uses a corrupted copy drawn once
// (one realization per vector per level) and the returned parameters are the
// best-validation snapshot. Throws DaeDivergenceError (a NumericalError) if
// the loss leaves the finite range, carrying the last finite checkpoint.
TrainResult dae_train(const TrainingSet& ts, const TrainConfig& cfg);

struct DaeDivergenceError : NumericalError {
    DaeDivergenceError(const std::string& msg, DaeParameters ckpt, int ep)
        : NumericalError(msg), checkpoint(std::move(ckpt)), epoch(ep) {}
    DaeParameters checkpoint;  // last finite parameters
    int epoch;
};

// Single-vector feed-forward evaluation.
std::vector<double> dae_apply(const DaeParameters& theta, const std::vector<double>& v);

// Batched feed-forward (rows of `in` are independent inputs).
RMat dae_forward_batch(const DaeParameters& theta, const RMat& in);

// Apply the DAE to every voxel time-profile of a Casorati matrix: real and
// imaginary parts are scaled by 1/gamma, passed through the network
// independently, rescaled by gamma and recombined.
CMat dae_apply_casorati(const DaeParameters& theta, const CMat& X, double gamma);

struct DaeGrads {
    std::vector<RMat> w;
    std::vector<std::vector<double>> bias;
};

// Mean-squared reconstruction loss (per entry) of the batch and its analytic
// gradient; exposed so the finite-difference check can see exactly what the
// optimizer sees.
double dae_loss_and_grad(const DaeParameters& theta, const RMat& noisy, const RMat& clean,
                         DaeGrads& grads);

// Flat serialization order: w0 row-major, bias0, w1, bias1, ... Used by the
// on-disk format; unpack validates the element count against dims.
std::vector<double> dae_pack(const DaeParameters& theta);
DaeParameters dae_unpack(const std::vector<std::size_t>& dims,
                         const std::vector<double>& flat);

}  // namespace navrec
