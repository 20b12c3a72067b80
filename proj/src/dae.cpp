#include "navrec/dae.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "navrec/linalg.hpp"
#include "navrec/rng.hpp"

namespace navrec {

namespace {

// C = A * B, ikj, parallel over output rows (deterministic accumulation)
RMat real_gemm(const RMat& A, const RMat& B) {
    RMat C(A.rows, B.cols);
#pragma omp parallel for schedule(static)
    for (long long ri = 0; ri < static_cast<long long>(A.rows); ++ri) {
        const std::size_t i = static_cast<std::size_t>(ri);
        double* crow = &C.at(i, 0);
        const double* arow = &A.at(i, 0);
        for (std::size_t k = 0; k < A.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = &B.at(k, 0);
            for (std::size_t j = 0; j < B.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return C;
}

RMat transpose(const RMat& A) {
    RMat T(A.cols, A.rows);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
    return T;
}

// forward pass keeping all activations (a[0] = input, a[4] = output)
void forward_cache(const DaeParameters& theta, const RMat& in, std::vector<RMat>& a) {
    a.clear();
    a.reserve(5);
    a.push_back(in);
    for (std::size_t l = 0; l < 4; ++l) {
        RMat z = real_gemm(a.back(), theta.w[l]);
        const std::vector<double>& b = theta.bias[l];
        const bool hidden = l < 3;
        for (std::size_t i = 0; i < z.rows; ++i) {
            double* row = &z.at(i, 0);
            for (std::size_t j = 0; j < z.cols; ++j) {
                row[j] += b[j];
                if (hidden && row[j] < 0.0) row[j] = 0.0;
            }
        }
        a.push_back(std::move(z));
    }
}

struct AdamState {
    std::vector<RMat> mw, vw;
    std::vector<std::vector<double>> mb, vb;
    long long step = 0;

    explicit AdamState(const DaeParameters& theta) {
        for (const RMat& w : theta.w) {
            mw.emplace_back(w.rows, w.cols);
            vw.emplace_back(w.rows, w.cols);
        }
        for (const std::vector<double>& b : theta.bias) {
            mb.emplace_back(b.size(), 0.0);
            vb.emplace_back(b.size(), 0.0);
        }
    }

    void update(DaeParameters& theta, const DaeGrads& g, const TrainConfig& cfg) {
        ++step;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        auto upd = [&](double& p, double& m, double& v, double grad) {
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad;
            p -= cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.adam_eps);
        };
        for (std::size_t l = 0; l < 4; ++l) {
            for (std::size_t i = 0; i < theta.w[l].size(); ++i)
                upd(theta.w[l].a[i], mw[l].a[i], vw[l].a[i], g.w[l].a[i]);
            for (std::size_t i = 0; i < theta.bias[l].size(); ++i)
                upd(theta.bias[l][i], mb[l][i], vb[l][i], g.bias[l][i]);
        }
    }
};

}  // namespace

std::size_t DaeParameters::n_params() const {
    std::size_t n = 0;
    for (const RMat& m : w) n += m.size();
    for (const std::vector<double>& b : bias) n += b.size();
    return n;
}

std::vector<std::size_t> dae_layer_dims(std::size_t n, std::size_t bottleneck_override) {
    if (n < 2) throw ConfigError("dae: input width must be at least 2");
    std::size_t b = bottleneck_override;
    if (b == 0) {
        b = (n == 400) ? 50
                       : static_cast<std::size_t>(std::llround(static_cast<double>(n) / 8.0));
        if (b < 1) b = 1;
    }
    if (b > n) throw ConfigError("dae: bottleneck wider than the input");
    const std::size_t h = (n + b + 1) / 2;  // halfway, rounded up
    return {n, h, b, h, n};
}

DaeParameters dae_init(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    if (dims.size() != 5) throw ConfigError("dae_init: expected 5 layer widths");
    DaeParameters theta;
    theta.dims = dims;
    Rng rng(seed);
    for (std::size_t l = 0; l < 4; ++l) {
        RMat w(dims[l], dims[l + 1]);
        const double limit = std::sqrt(6.0 / static_cast<double>(dims[l]));
        for (double& v : w.a) v = rng.uniform(-limit, limit);
        theta.w.push_back(std::move(w));
        theta.bias.emplace_back(dims[l + 1], 0.0);
    }
    return theta;
}

TrainingSet prepare_training_vectors(const NavigatorMatrix& nav) {
    const CMat& Z = nav.Z;
    if (Z.rows == 0 || Z.cols == 0)
        throw DegenerateInputError("prepare_training_vectors: empty navigator matrix");
    TrainingSet ts;
    ts.n = Z.cols;
    ts.vectors.reserve(2 * Z.rows);
    double gamma = 0.0;
    for (std::size_t r = 0; r < Z.rows; ++r) {
        std::vector<double> re(Z.cols), im(Z.cols);
        for (std::size_t t = 0; t < Z.cols; ++t) {
            re[t] = Z.at(r, t).real();
            im[t] = Z.at(r, t).imag();
            gamma = std::max(gamma, std::max(std::abs(re[t]), std::abs(im[t])));
        }
        ts.vectors.push_back(std::move(re));
        ts.vectors.push_back(std::move(im));
    }
    if (gamma == 0.0)
        throw DegenerateInputError("prepare_training_vectors: navigator matrix is all zero");
    const double inv = 1.0 / gamma;
    for (auto& v : ts.vectors)
        for (double& x : v) x *= inv;
    ts.gamma = gamma;
    return ts;
}

void TrainConfig::validate() const {
    if (noise_levels.empty() || realizations_per_level.size() != noise_levels.size())
        throw ConfigError("dae train: noise levels and realization weights must align");
    for (double s : noise_levels)
        if (!(s > 0.0 && s < 1.0))
            throw ConfigError("dae train: noise levels must lie in (0, 1)");
    for (std::size_t i = 0; i < noise_levels.size(); ++i) {
        if (realizations_per_level[i] < 1)
            throw ConfigError("dae train: realization weights must be >= 1");
        if (i > 0) {
            if (noise_levels[i] >= noise_levels[i - 1])
                throw ConfigError("dae train: noise levels must be strictly decreasing");
            if (realizations_per_level[i] < realizations_per_level[i - 1])
                throw ConfigError("dae train: realization weights must not decrease "
                                  "as noise shrinks");
        }
    }
    if (epochs < 1 || batch < 1) throw ConfigError("dae train: epochs and batch must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("dae train: learning rate must be positive");
}

double dae_loss_and_grad(const DaeParameters& theta, const RMat& noisy, const RMat& clean,
                         DaeGrads& grads) {
    if (noisy.rows != clean.rows || noisy.cols != clean.cols ||
        noisy.cols != theta.input_width())
        throw DimensionError("dae_loss_and_grad: batch shape mismatch");
    const std::size_t B = noisy.rows, n = noisy.cols;

    std::vector<RMat> a;
    forward_cache(theta, noisy, a);

    const double inv_bn = 1.0 / (static_cast<double>(B) * static_cast<double>(n));
    RMat delta(B, n);
    double loss = 0.0;
    for (std::size_t i = 0; i < B; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double r = a[4].at(i, j) - clean.at(i, j);
            loss += r * r;
            delta.at(i, j) = 2.0 * inv_bn * r;
        }
    loss *= inv_bn;

    grads.w.assign(4, RMat());
    grads.bias.assign(4, {});
    for (std::size_t l = 4; l-- > 0;) {
        grads.w[l] = real_gemm(transpose(a[l]), delta);
        std::vector<double> gb(theta.bias[l].size(), 0.0);
        for (std::size_t i = 0; i < delta.rows; ++i)
            for (std::size_t j = 0; j < delta.cols; ++j) gb[j] += delta.at(i, j);
        grads.bias[l] = std::move(gb);
        if (l > 0) {
            RMat d = real_gemm(delta, transpose(theta.w[l]));
            // ReLU mask from the stored (post-activation) hidden layer
            for (std::size_t i = 0; i < d.rows; ++i)
                for (std::size_t j = 0; j < d.cols; ++j)
                    if (a[l].at(i, j) <= 0.0) d.at(i, j) = 0.0;
            delta = std::move(d);
        }
    }
    return loss;
}

RMat dae_forward_batch(const DaeParameters& theta, const RMat& in) {
    if (in.cols != theta.input_width())
        throw DimensionError("dae_forward_batch: input width mismatch");
    std::vector<RMat> a;
    forward_cache(theta, in, a);
    return std::move(a.back());
}

std::vector<double> dae_apply(const DaeParameters& theta, const std::vector<double>& v) {
    if (v.size() != theta.input_width())
        throw DimensionError("dae_apply: input width mismatch");
    RMat in(1, v.size());
    in.a = v;
    RMat out = dae_forward_batch(theta, in);
    return out.a;
}

CMat dae_apply_casorati(const DaeParameters& theta, const CMat& X, double gamma) {
    if (X.cols != theta.input_width())
        throw DimensionError("dae_apply_casorati: profile length " + std::to_string(X.cols) +
                             " does not match network input " +
                             std::to_string(theta.input_width()));
    if (!(gamma > 0.0))
        throw DegenerateInputError("dae_apply_casorati: gamma must be positive");
    const std::size_t m = X.rows, n = X.cols;
    CMat out(m, n);

    constexpr std::size_t kBlock = 64;
    for (std::size_t base = 0; base < m; base += kBlock) {
        const std::size_t rows = std::min(kBlock, m - base);
        RMat in(2 * rows, n);  // first half real parts, second half imaginary
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t t = 0; t < n; ++t) {
                const cd v = X.at(base + i, t);
                in.at(i, t) = v.real() / gamma;
                in.at(rows + i, t) = v.imag() / gamma;
            }
        RMat res = dae_forward_batch(theta, in);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t t = 0; t < n; ++t)
                out.at(base + i, t) =
                    cd(res.at(i, t) * gamma, res.at(rows + i, t) * gamma);
    }
    return out;
}

namespace {

std::size_t pick_level(const std::vector<int>& weights, int total, Rng& rng) {
    int draw = static_cast<int>(rng.uniform() * total);
    if (draw >= total) draw = total - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        draw -= weights[i];
        if (draw < 0) return i;
    }
    return weights.size() - 1;
}

}  // namespace

TrainResult dae_train(const TrainingSet& ts, const TrainConfig& cfg) {
    cfg.validate();
    if (ts.vectors.empty())
        throw DegenerateInputError("dae_train: empty training set");
    const std::size_t N = ts.vectors.size();
    const std::size_t n = ts.n;

    TrainResult result;
    result.gamma = ts.gamma;

    const auto dims = dae_layer_dims(n, cfg.bottleneck_override);
    if (N < dims[2])
        result.warnings.push_back("training set smaller than the bottleneck width (" +
                                  std::to_string(N) + " < " + std::to_string(dims[2]) +
                                  "); expect a degenerate manifold fit");

    // held-out split: seeded shuffle, last 10% (>= 1) to validation
    std::vector<std::size_t> order(N);
    for (std::size_t i = 0; i < N; ++i) order[i] = i;
    Rng split_rng(cfg.seed ^ 0x517Fu);
    shuffle(order, split_rng);
    std::size_t n_val = (N >= 2) ? std::max<std::size_t>(1, (N + 5) / 10) : 0;
    if (n_val >= N) n_val = N - 1;
    std::vector<std::size_t> train_idx(order.begin(), order.end() - n_val);
    result.val_indices.assign(order.end() - n_val, order.end());
    if (n_val == 0) result.val_indices = train_idx;  // single-vector degenerate case

    const std::size_t L = cfg.noise_levels.size();
    int weight_total = 0;
    for (int w : cfg.realizations_per_level) weight_total += w;

    // fixed corrupted validation set: one realization per vector per level
    Rng val_rng(cfg.seed ^ 0x7A1u);
    const std::size_t n_val_pairs = result.val_indices.size() * L;
    RMat val_noisy(n_val_pairs, n), val_clean(n_val_pairs, n);
    {
        std::size_t row = 0;
        for (std::size_t vi : result.val_indices)
            for (std::size_t lv = 0; lv < L; ++lv, ++row) {
                const std::vector<double>& v = ts.vectors[vi];
                for (std::size_t j = 0; j < n; ++j) {
                    val_clean.at(row, j) = v[j];
                    val_noisy.at(row, j) = v[j] + cfg.noise_levels[lv] * val_rng.gaussian();
                }
            }
    }

    DaeParameters theta = dae_init(dims, cfg.seed);
    AdamState adam(theta);
    DaeGrads grads;

    DaeParameters best = theta;
    double best_val = std::numeric_limits<double>::infinity();
    Rng epoch_rng(cfg.seed ^ 0xE90Cu);

    auto eval_val = [&](const DaeParameters& p) {
        double sq = 0.0;
        constexpr std::size_t kChunk = 64;
        for (std::size_t base = 0; base < n_val_pairs; base += kChunk) {
            const std::size_t rows = std::min(kChunk, n_val_pairs - base);
            RMat in(rows, n);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < n; ++j) in.at(i, j) = val_noisy.at(base + i, j);
            RMat out = dae_forward_batch(p, in);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double r = out.at(i, j) - val_clean.at(base + i, j);
                    sq += r * r;
                }
        }
        return sq / (static_cast<double>(n_val_pairs) * static_cast<double>(n));
    };

    const std::size_t B = static_cast<std::size_t>(cfg.batch);
    std::vector<std::size_t> epoch_order = train_idx;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(epoch_order, epoch_rng);
        double epoch_sq = 0.0;
        for (std::size_t base = 0; base < epoch_order.size(); base += B) {
            const std::size_t rows = std::min(B, epoch_order.size() - base);
            RMat clean(rows, n), noisy(rows, n);
            for (std::size_t i = 0; i < rows; ++i) {
                const std::vector<double>& v = ts.vectors[epoch_order[base + i]];
                const std::size_t lv = pick_level(cfg.realizations_per_level, weight_total,
                                                  epoch_rng);
                const double sigma = cfg.noise_levels[lv];
                for (std::size_t j = 0; j < n; ++j) {
                    clean.at(i, j) = v[j];
                    noisy.at(i, j) = v[j] + sigma * epoch_rng.gaussian();
                }
            }
            const double batch_loss = dae_loss_and_grad(theta, noisy, clean, grads);
            epoch_sq += batch_loss * static_cast<double>(rows) * static_cast<double>(n);
            adam.update(theta, grads, cfg);
        }
        const double train_loss =
            epoch_sq / (static_cast<double>(epoch_order.size()) * static_cast<double>(n));
        const double val_loss = eval_val(theta);
        result.train_loss.push_back(train_loss);
        result.val_loss.push_back(val_loss);

        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw DaeDivergenceError("dae_train: loss diverged at epoch " +
                                         std::to_string(epoch) +
                                         " (last finite checkpoint attached)",
                                     best, epoch);

        if (val_loss < best_val) {
            best_val = val_loss;
            best = theta;
            result.best_epoch = epoch;
        }
    }

    result.theta = std::move(best);
    return result;
}

std::vector<double> dae_pack(const DaeParameters& theta) {
    std::vector<double> flat;
    flat.reserve(theta.n_params());
    for (std::size_t l = 0; l < theta.w.size(); ++l) {
        flat.insert(flat.end(), theta.w[l].a.begin(), theta.w[l].a.end());
        flat.insert(flat.end(), theta.bias[l].begin(), theta.bias[l].end());
    }
    return flat;
}

DaeParameters dae_unpack(const std::vector<std::size_t>& dims,
                         const std::vector<double>& flat) {
    require(dims.size() >= 2, "dae_unpack: need at least one layer");
    DaeParameters theta;
    theta.dims = dims;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        RMat w(dims[l], dims[l + 1]);
        require(off + w.a.size() <= flat.size(), "dae_unpack: payload too short");
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
                  flat.begin() + static_cast<std::ptrdiff_t>(off + w.a.size()), w.a.begin());
        off += w.a.size();
        std::vector<double> b(dims[l + 1]);
        require(off + b.size() <= flat.size(), "dae_unpack: payload too short");
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
                  flat.begin() + static_cast<std::ptrdiff_t>(off + b.size()), b.begin());
        off += b.size();
        theta.w.push_back(std::move(w));
        theta.bias.push_back(std::move(b));
    }
    require(off == flat.size(), "dae_unpack: payload size mismatch");
    return theta;
}

}  // namespace navrec
