#include "navrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "navrec/errors.hpp"
#include "navrec/linalg.hpp"

namespace navrec {

namespace {

constexpr double kSerCapDb = 300.0;

void check_same_shape(const RMat& a, const RMat& b, const char* who) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw DimensionError(std::string(who) + ": image shapes differ");
}

// symmetric (mirror, edge included) index fold into [0, n)
std::size_t sym_index(long long i, std::size_t n) {
    const long long period = 2 * static_cast<long long>(n);
    long long j = i % period;
    if (j < 0) j += period;
    if (j >= static_cast<long long>(n)) j = period - 1 - j;
    return static_cast<std::size_t>(j);
}

// horizontal then vertical correlation with mirror padding; taps need not sum to 1
RMat sep_filter_sym(const RMat& img, const std::vector<double>& taps_x,
                    const std::vector<double>& taps_y) {
    const std::size_t H = img.rows, W = img.cols;
    const long long rx = (static_cast<long long>(taps_x.size()) - 1) / 2;
    const long long ry = (static_cast<long long>(taps_y.size()) - 1) / 2;
    RMat tmp(H, W), out(H, W);
    for (std::size_t r = 0; r < H; ++r)
        for (std::size_t c = 0; c < W; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < taps_x.size(); ++k)
                acc += taps_x[k] *
                       img.at(r, sym_index(static_cast<long long>(c) + static_cast<long long>(k) - rx, W));
            tmp.at(r, c) = acc;
        }
    for (std::size_t r = 0; r < H; ++r)
        for (std::size_t c = 0; c < W; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < taps_y.size(); ++k)
                acc += taps_y[k] *
                       tmp.at(sym_index(static_cast<long long>(r) + static_cast<long long>(k) - ry, H), c);
            out.at(r, c) = acc;
        }
    return out;
}

// valid-region separable correlation (no padding); output is (H-w+1) x (W-w+1)
RMat sep_filter_valid(const RMat& img, const std::vector<double>& taps) {
    const std::size_t w = taps.size();
    const std::size_t H = img.rows, W = img.cols;
    const std::size_t Hv = H - w + 1, Wv = W - w + 1;
    RMat tmp(H, Wv), out(Hv, Wv);
    for (std::size_t r = 0; r < H; ++r)
        for (std::size_t c = 0; c < Wv; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < w; ++k) acc += taps[k] * img.at(r, c + k);
            tmp.at(r, c) = acc;
        }
    for (std::size_t r = 0; r < Hv; ++r)
        for (std::size_t c = 0; c < Wv; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < w; ++k) acc += taps[k] * tmp.at(r + k, c);
            out.at(r, c) = acc;
        }
    return out;
}

double sample_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double vec_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> gaussian_taps(std::size_t window, double sigma) {
    if (window == 0 || window % 2 == 0)
        throw ConfigError("gaussian_taps: window must be odd and positive");
    if (sigma <= 0.0) throw ConfigError("gaussian_taps: sigma must be positive");
    std::vector<double> g(window);
    const double c = (static_cast<double>(window) - 1.0) / 2.0;
    for (std::size_t i = 0; i < window; ++i) {
        const double d = static_cast<double>(i) - c;
        g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    return g;
}

double ser_db(const RMat& ref, const RMat& rec) {
    check_same_shape(ref, rec, "ser_db");
    const std::size_t n = ref.a.size();
    double ref_sq = 0.0, err_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ref_sq += ref.a[i] * ref.a[i];
        const double d = ref.a[i] - rec.a[i];
        err_sq += d * d;
    }
    if (ref_sq == 0.0) throw DegenerateInputError("ser_db: reference image is all zero");
    if (err_sq == 0.0) return kSerCapDb;
    const double v = 10.0 * std::log10(ref_sq / err_sq);
    return std::min(v, kSerCapDb);
}

double ssim(const RMat& ref, const RMat& rec, const SsimOptions& opts) {
    check_same_shape(ref, rec, "ssim");
    if (ref.rows < opts.window || ref.cols < opts.window)
        throw DimensionError("ssim: image smaller than the window");
    const double L = *std::max_element(ref.a.begin(), ref.a.end());
    if (L <= 0.0) throw DegenerateInputError("ssim: reference has no dynamic range");
    const double c1 = (opts.k1 * L) * (opts.k1 * L);
    const double c2 = (opts.k2 * L) * (opts.k2 * L);

    std::vector<double> g = gaussian_taps(opts.window, opts.sigma);
    double gsum = 0.0;
    for (double v : g) gsum += v;
    for (double& v : g) v /= gsum;  // separable window now sums to 1 as a product

    const std::size_t H = ref.rows, W = ref.cols;
    RMat xx(H, W), yy(H, W), xy(H, W);
    for (std::size_t i = 0; i < ref.a.size(); ++i) {
        xx.a[i] = ref.a[i] * ref.a[i];
        yy.a[i] = rec.a[i] * rec.a[i];
        xy.a[i] = ref.a[i] * rec.a[i];
    }
    RMat mx = sep_filter_valid(ref, g);
    RMat my = sep_filter_valid(rec, g);
    RMat sxx = sep_filter_valid(xx, g);
    RMat syy = sep_filter_valid(yy, g);
    RMat sxy = sep_filter_valid(xy, g);

    double acc = 0.0;
    const std::size_t nv = mx.a.size();
    for (std::size_t i = 0; i < nv; ++i) {
        const double vx = sxx.a[i] - mx.a[i] * mx.a[i];
        const double vy = syy.a[i] - my.a[i] * my.a[i];
        const double cxy = sxy.a[i] - mx.a[i] * my.a[i];
        const double num = (2.0 * mx.a[i] * my.a[i] + c1) * (2.0 * cxy + c2);
        const double den = (mx.a[i] * mx.a[i] + my.a[i] * my.a[i] + c1) * (vx + vy + c2);
        acc += num / den;
    }
    return acc / static_cast<double>(nv);
}

double hfen(const RMat& ref, const RMat& rec, const HfenOptions& opts) {
    check_same_shape(ref, rec, "hfen");
    if (opts.window == 0 || opts.window % 2 == 0)
        throw ConfigError("hfen: window must be odd and positive");

    // zero-mean Laplacian-of-Gaussian taps, built separably:
    //   h1(x,y) = (a_x g_y + g_x a_y) / S  with a_i = ((i-c)^2 - s^2)/s^4 * g_i
    //   K = h1 - mean(h1), applied as two separable passes minus a box filter
    const std::size_t w = opts.window;
    const double s2 = opts.sigma * opts.sigma;
    std::vector<double> g = gaussian_taps(w, opts.sigma);
    std::vector<double> a(w);
    const double c = (static_cast<double>(w) - 1.0) / 2.0;
    for (std::size_t i = 0; i < w; ++i) {
        const double d = static_cast<double>(i) - c;
        a[i] = (d * d - s2) / (s2 * s2) * g[i];
    }
    double gsum = 0.0;
    for (double v : g) gsum += v;
    for (double& v : g) v /= gsum;
    for (double& v : a) v /= gsum;  // splits the overall 1/(sum g)^2 between the passes

    // mean of h1 over the w*w support: sum h1 = 2*(sum a)(sum g) with g now summing to 1
    double asum = 0.0;
    for (double v : a) asum += v;
    const double mean_tap = 2.0 * asum / (static_cast<double>(w) * static_cast<double>(w));

    auto log_of = [&](const RMat& img) {
        RMat ag = sep_filter_sym(img, a, g);
        RMat ga = sep_filter_sym(img, g, a);
        std::vector<double> box(w, 1.0);
        RMat bx = sep_filter_sym(img, box, box);
        RMat out(img.rows, img.cols);
        for (std::size_t i = 0; i < out.a.size(); ++i)
            out.a[i] = ag.a[i] + ga.a[i] - mean_tap * bx.a[i];
        return out;
    };

    RMat lr = log_of(ref);
    RMat lc = log_of(rec);
    std::vector<double> dv(lr.a.size());
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = lc.a[i] - lr.a[i];
    double den_sq = 0.0, num_sq = 0.0, ref_sq = 0.0;
    for (std::size_t i = 0; i < dv.size(); ++i) {
        den_sq += lr.a[i] * lr.a[i];
        num_sq += dv[i] * dv[i];
        ref_sq += ref.a[i] * ref.a[i];
    }
    // a flat reference leaves only roundoff in the filtered image
    if (den_sq <= 1e-24 * ref_sq)
        throw DegenerateInputError("hfen: reference has no high-frequency content");
    return std::sqrt(num_sq) / std::sqrt(den_sq);
}

MetricReport evaluate_casorati(const CMat& ref, const CMat& rec, std::size_t H,
                               std::size_t W, const SsimOptions& sopts,
                               const HfenOptions& hopts) {
    if (ref.rows != rec.rows || ref.cols != rec.cols)
        throw DimensionError("evaluate_casorati: Casorati shapes differ");
    if (ref.rows != H * W) throw DimensionError("evaluate_casorati: rows != H*W");
    const std::size_t n = ref.cols;
    require(n >= 1, "evaluate_casorati: no frames");

    MetricReport rep;
    rep.ser.resize(n);
    rep.ssim.resize(n);
    rep.hfen.resize(n);

#pragma omp parallel for schedule(dynamic)
    for (long long tt = 0; tt < static_cast<long long>(n); ++tt) {
        const auto t = static_cast<std::size_t>(tt);
        RMat fr(H, W), fc(H, W);
        for (std::size_t i = 0; i < H * W; ++i) {
            fr.a[i] = std::abs(ref.at(i, t));
            fc.a[i] = std::abs(rec.at(i, t));
        }
        rep.ser[t] = ser_db(fr, fc);
        rep.ssim[t] = ssim(fr, fc, sopts);
        rep.hfen[t] = hfen(fr, fc, hopts);
    }

    rep.ser_mean = vec_mean(rep.ser);
    rep.ssim_mean = vec_mean(rep.ssim);
    rep.hfen_mean = vec_mean(rep.hfen);
    rep.ser_std = sample_std(rep.ser, rep.ser_mean);
    rep.ssim_std = sample_std(rep.ssim, rep.ssim_mean);
    rep.hfen_std = sample_std(rep.hfen, rep.hfen_mean);
    return rep;
}

std::string metrics_csv(const MetricReport& rep) {
    std::string out = "frame,ser_db,ssim,hfen\n";
    char buf[160];
    for (std::size_t t = 0; t < rep.ser.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g\n", t, rep.ser[t],
                      rep.ssim[t], rep.hfen[t]);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "mean,%.10g,%.10g,%.10g\n", rep.ser_mean, rep.ssim_mean,
                  rep.hfen_mean);
    out += buf;
    std::snprintf(buf, sizeof(buf), "std,%.10g,%.10g,%.10g\n", rep.ser_std, rep.ssim_std,
                  rep.hfen_std);
    out += buf;
    return out;
}

}  // namespace navrec
