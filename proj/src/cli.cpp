#include "navrec/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "navrec/acquisition.hpp"
#include "navrec/dae.hpp"
#include "navrec/errors.hpp"
#include "navrec/hash.hpp"
#include "navrec/io.hpp"
#include "navrec/linalg.hpp"
#include "navrec/metrics.hpp"
#include "navrec/operators.hpp"
#include "navrec/phantom.hpp"
#include "navrec/priors.hpp"
#include "navrec/recon.hpp"
#include "navrec/threading.hpp"
#include "navrec/trajectory.hpp"
#include "navrec/types.hpp"

namespace navrec {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json parse_meta(const std::string& s) {
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return json::object();
    return j;
}

// Per-run provenance sidecar: config snapshot, input/output hashes, timings.
// Timings vary run to run, so manifests live next to (not inside) the
// bit-reproducible artifacts.
struct Manifest {
    json args = json::object();
    json inputs = json::object();
    json outputs = json::object();
    json timings = json::object();
    std::string command;
    Clock::time_point t0 = Clock::now();
    Clock::time_point last = t0;

    void stage(const std::string& name) {
        const auto now = Clock::now();
        timings[name] = ms_between(last, now);
        last = now;
    }
    void input(const std::string& path) { inputs[path] = hex64(file_fnv1a(path)); }
    void output(const std::string& path) { outputs[path] = hex64(file_fnv1a(path)); }
    void write(const std::string& primary_output) const {
        json j;
        j["command"] = command;
        j["args"] = args;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["timings_ms"] = timings;
        j["total_ms"] = ms_between(t0, Clock::now());
        write_text_atomic(primary_output + ".manifest.json", j.dump(2) + "\n");
    }
};

void apply_threads(int cli_threads) {
    if (cli_threads >= 1) {
        set_threads(cli_threads);
    } else if (int e = env_threads()) {
        set_threads(e);
    }
}

// format doubles for metadata/CSV deterministically
std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::size_t meta_size(const json& m, const char* key) {
    if (!m.contains(key) || !m[key].is_number_unsigned())
        throw IoError(std::string("metadata is missing '") + key + "'");
    return m[key].get<std::size_t>();
}

std::size_t pick_dim(std::size_t flag_value, const json& meta, const char* key) {
    if (flag_value > 0) return flag_value;
    return meta_size(meta, key);
}

CoilMapSet load_coil_maps(const std::string& path) {
    Cxt1File f = read_cxt1(path);
    if (f.dtype != 0 || f.dims.size() != 3)
        throw IoError("expected a 3-D complex coil-map tensor in " + path);
    CoilMapSet maps;
    maps.n_coils = static_cast<std::size_t>(f.dims[0]);
    maps.H = static_cast<std::size_t>(f.dims[1]);
    maps.W = static_cast<std::size_t>(f.dims[2]);
    maps.maps = std::move(f.cdata);
    return maps;
}

void save_coil_maps(const std::string& path, const CoilMapSet& maps, const json& meta) {
    write_cxt1_complex(path, {maps.n_coils, maps.H, maps.W}, maps.maps.data(), meta.dump());
}

NavigatorMatrix load_navigators(const std::string& path) {
    std::string meta_text;
    NavigatorMatrix nav;
    nav.Z = load_cmat(path, &meta_text);
    json m = parse_meta(meta_text);
    nav.n_readout = m.contains("n_readout") ? m["n_readout"].get<std::size_t>() : 0;
    if (m.contains("spoke") && m.contains("pos") && m.contains("coil")) {
        const auto& sp = m["spoke"];
        const auto& po = m["pos"];
        const auto& co = m["coil"];
        if (sp.size() == nav.Z.rows && po.size() == nav.Z.rows && co.size() == nav.Z.rows)
            for (std::size_t i = 0; i < nav.Z.rows; ++i)
                nav.rows.push_back({sp[i].get<std::size_t>(), po[i].get<std::size_t>(),
                                    co[i].get<std::size_t>()});
    }
    return nav;
}

struct LoadedKspace {
    KSpaceData y;
    json meta;
    std::size_t H = 0, W = 0;
};

LoadedKspace load_kspace(const std::string& path, std::size_t flag_h, std::size_t flag_w) {
    Cxt1File f = read_cxt1(path);
    if (f.dtype != 0 || f.dims.size() != 4)
        throw IoError("expected a 4-D complex k-space tensor in " + path);
    LoadedKspace out;
    out.meta = parse_meta(f.meta_json);
    out.H = pick_dim(flag_h, out.meta, "height");
    out.W = pick_dim(flag_w, out.meta, "width");
    const auto n = static_cast<std::size_t>(f.dims[0]);
    const auto c = static_cast<std::size_t>(f.dims[1]);
    const auto s = static_cast<std::size_t>(f.dims[2]);
    const auto r = static_cast<std::size_t>(f.dims[3]);
    out.y.traj = golden_angle_trajectory(n, s, r);
    out.y.n_coils = c;
    out.y.noise_sigma = out.meta.contains("noise_sigma")
                            ? out.meta["noise_sigma"].get<double>()
                            : 0.0;
    out.y.data = std::move(f.cdata);
    return out;
}

void save_dae(const std::string& path, const DaeParameters& theta, double gamma,
              json extra) {
    std::vector<double> flat = dae_pack(theta);
    extra["kind"] = "dae";
    extra["dims"] = theta.dims;
    extra["gamma"] = gamma;
    write_cxt1_real(path, {flat.size()}, flat.data(), extra.dump());
}

struct LoadedDae {
    DaeParameters theta;
    double gamma = 1.0;
};

LoadedDae load_dae(const std::string& path) {
    Cxt1File f = read_cxt1(path);
    if (f.dtype != 1 || f.dims.size() != 1)
        throw IoError("expected a 1-D real parameter tensor in " + path);
    json m = parse_meta(f.meta_json);
    if (!m.contains("dims") || !m["dims"].is_array())
        throw IoError("dae file is missing layer dims in " + path);
    std::vector<std::size_t> dims = m["dims"].get<std::vector<std::size_t>>();
    LoadedDae out;
    out.theta = dae_unpack(dims, f.rdata);
    out.gamma = m.contains("gamma") ? m["gamma"].get<double>() : 1.0;
    return out;
}

int guarded(const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "error (numerical): %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error (unexpected): %s\n", e.what());
        return 3;
    }
}

// ---------------------------------------------------------------- phantom --

struct PhantomOpts {
    PhantomConfig cfg;
    std::size_t coils = 8;
    std::uint64_t coil_seed = 2;
    int threads = 0;
    std::string out_phantom = "phantom.cxt1";
    std::string out_coils = "coils.cxt1";
};

int cmd_phantom(const PhantomOpts& o) {
    apply_threads(o.threads);
    Manifest man;
    man.command = "phantom";
    man.args = {{"height", o.cfg.H},
                {"width", o.cfg.W},
                {"frames", o.cfg.n_frames},
                {"cardiac_period", o.cfg.cardiac_period},
                {"resp_period", o.cfg.resp_period},
                {"cardiac_amplitude", o.cfg.cardiac_amplitude},
                {"resp_amplitude", o.cfg.resp_amplitude},
                {"seed", o.cfg.seed},
                {"coils", o.coils},
                {"coil_seed", o.coil_seed}};

    o.cfg.validate();
    if (o.coils < 1) throw ConfigError("phantom: --coils must be >= 1");

    CMat X = generate_phantom(o.cfg);
    man.stage("phantom_ms");
    CoilMapSet maps = generate_coil_maps(o.cfg.H, o.cfg.W, o.coils, o.coil_seed);
    man.stage("coils_ms");

    json pm = {{"kind", "phantom"},
               {"height", o.cfg.H},
               {"width", o.cfg.W},
               {"frames", o.cfg.n_frames},
               {"cardiac_period", o.cfg.cardiac_period},
               {"resp_period", o.cfg.resp_period},
               {"cardiac_amplitude", o.cfg.cardiac_amplitude},
               {"resp_amplitude", o.cfg.resp_amplitude},
               {"seed", o.cfg.seed}};
    save_cmat(o.out_phantom, X, pm.dump());
    json cm = {{"kind", "coil_maps"},
               {"height", o.cfg.H},
               {"width", o.cfg.W},
               {"coils", o.coils},
               {"seed", o.coil_seed}};
    save_coil_maps(o.out_coils, maps, cm);
    man.stage("write_ms");
    man.output(o.out_phantom);
    man.output(o.out_coils);
    man.write(o.out_phantom);

    std::printf("wrote %s [%zu x %zu] and %s [%zu coils]\n", o.out_phantom.c_str(),
                X.rows, X.cols, o.out_coils.c_str(), maps.n_coils);
    return 0;
}

// ---------------------------------------------------------------- acquire --

struct AcquireOpts {
    std::string phantom_path, coils_path;
    std::size_t spokes = 10;
    std::size_t readout = 0;  // 0 = 2 * max(H, W)
    double noise = 0.0;
    std::uint64_t seed = 3;
    std::size_t compress = 0;  // 0 = keep physical coils
    int threads = 0;
    std::string out_kspace = "kspace.cxt1";
    std::string out_nav = "navigators.cxt1";
};

int cmd_acquire(const AcquireOpts& o) {
    apply_threads(o.threads);
    Manifest man;
    man.command = "acquire";
    man.args = {{"spokes", o.spokes}, {"readout", o.readout},     {"noise", o.noise},
                {"seed", o.seed},     {"compress", o.compress}};
    man.input(o.phantom_path);
    man.input(o.coils_path);

    std::string pmeta_text;
    CMat X = load_cmat(o.phantom_path, &pmeta_text);
    json pmeta = parse_meta(pmeta_text);
    CoilMapSet maps = load_coil_maps(o.coils_path);
    if (maps.H * maps.W != X.rows)
        throw DimensionError("acquire: coil maps and phantom grids disagree");
    if (o.noise < 0.0) throw ConfigError("acquire: --noise must be >= 0");
    man.stage("load_ms");

    const std::size_t n_readout = o.readout ? o.readout : 2 * std::max(maps.H, maps.W);
    RadialTrajectory traj = golden_angle_trajectory(X.cols, o.spokes, n_readout);
    KSpaceData y = acquire(X, maps, traj, o.noise, o.seed);
    man.stage("acquire_ms");

    json km = {{"kind", "kspace"},      {"height", maps.H},
               {"width", maps.W},       {"noise_sigma", o.noise},
               {"seed", o.seed},        {"physical_coils", maps.n_coils}};
    std::string coil_sidecar;
    if (o.compress > 0 && o.compress < y.n_coils) {
        CoilCompressionResult cc = pca_compress_coils(y, maps, o.compress);
        y = std::move(cc.y);
        maps = std::move(cc.maps);
        km["virtual_coils"] = o.compress;
        km["retained_energy"] = cc.retained_energy;
        coil_sidecar = o.out_kspace + ".coils.cxt1";
        json vm = {{"kind", "coil_maps"},
                   {"height", maps.H},
                   {"width", maps.W},
                   {"coils", maps.n_coils},
                   {"virtual", true}};
        save_coil_maps(coil_sidecar, maps, vm);
        std::printf("compressed %zu -> %zu coils (retained energy %.6f)\n",
                    static_cast<std::size_t>(km["physical_coils"]), o.compress,
                    cc.retained_energy);
    } else if (o.compress >= y.n_coils && o.compress != 0) {
        std::printf("note: --compress %zu >= coil count, skipping compression\n",
                    o.compress);
    }
    man.stage("compress_ms");

    NavigatorMatrix nav = extract_navigators(y);
    man.stage("navigators_ms");

    write_cxt1_complex(o.out_kspace,
                       {y.traj.n_frames, y.n_coils, y.traj.spokes_per_frame,
                        y.traj.n_readout},
                       y.data.data(), km.dump());

    json nm = {{"kind", "navigators"}, {"n_readout", nav.n_readout}};
    {
        std::vector<std::size_t> sp, po, co;
        for (const auto& r : nav.rows) {
            sp.push_back(r.spoke);
            po.push_back(r.pos);
            co.push_back(r.coil);
        }
        nm["spoke"] = sp;
        nm["pos"] = po;
        nm["coil"] = co;
    }
    save_cmat(o.out_nav, nav.Z, nm.dump());
    man.stage("write_ms");
    man.output(o.out_kspace);
    man.output(o.out_nav);
    if (!coil_sidecar.empty()) man.output(coil_sidecar);
    man.write(o.out_kspace);

    std::printf("wrote %s [%zu frames, %zu coils, %zu spokes, %zu readout] and %s [%zu x %zu]\n",
                o.out_kspace.c_str(), y.traj.n_frames, y.n_coils, y.traj.spokes_per_frame,
                y.traj.n_readout, o.out_nav.c_str(), nav.Z.rows, nav.Z.cols);
    return 0;
}

// -------------------------------------------------------------- train-dae --

struct TrainOpts {
    std::string nav_path;
    TrainConfig cfg;
    int threads = 0;
    std::string out = "dae.cxt1";
};

int cmd_train_dae(const TrainOpts& o) {
    apply_threads(o.threads);
    Manifest man;
    man.command = "train-dae";
    man.args = {{"epochs", o.cfg.epochs},
                {"batch", o.cfg.batch},
                {"lr", o.cfg.lr},
                {"seed", o.cfg.seed},
                {"bottleneck", o.cfg.bottleneck_override}};
    man.input(o.nav_path);

    NavigatorMatrix nav = load_navigators(o.nav_path);
    TrainingSet ts = prepare_training_vectors(nav);
    man.stage("prepare_ms");

    TrainResult res = dae_train(ts, o.cfg);
    man.stage("train_ms");

    json extra = {{"best_epoch", res.best_epoch},
                  {"epochs", o.cfg.epochs},
                  {"batch", o.cfg.batch},
                  {"lr", o.cfg.lr},
                  {"seed", o.cfg.seed},
                  {"warnings", res.warnings}};
    save_dae(o.out, res.theta, res.gamma, extra);

    std::string csv = "epoch,train_mse,val_mse\n";
    for (std::size_t e = 0; e < res.train_loss.size(); ++e)
        csv += std::to_string(e) + "," + fmt_g(res.train_loss[e]) + "," +
               fmt_g(res.val_loss[e]) + "\n";
    write_text_atomic(o.out + ".loss.csv", csv);
    man.stage("write_ms");
    man.output(o.out);
    man.output(o.out + ".loss.csv");
    man.write(o.out);

    std::printf("trained %zu-d profiles, best epoch %d, final val mse %.3e -> %s\n",
                ts.n, res.best_epoch,
                res.val_loss.empty() ? 0.0 : res.val_loss.back(), o.out.c_str());
    for (const auto& w : res.warnings) std::printf("warning: %s\n", w.c_str());
    return 0;
}

// ------------------------------------------------------------------ recon --

struct ReconOpts {
    std::string kspace_path, coils_path;
    std::string dae_path, basis_path, nav_path;
    std::string method = "dae";
    double lambda = -1.0;
    std::size_t rank = 30;
    int outer = 10;
    int cg_iters = 30;
    double cg_tol = 1e-6;
    double early_stop = 1e-4;
    std::string init = "zero-filled";
    std::size_t height = 0, width = 0;
    int threads = 0;
    std::string out = "recon.cxt1";
    std::string save_basis;
};

int cmd_recon(const ReconOpts& o) {
    apply_threads(o.threads);
    Manifest man;
    man.command = "recon";
    man.args = {{"method", o.method},   {"lambda", o.lambda},
                {"rank", o.rank},       {"outer", o.outer},
                {"cg_iters", o.cg_iters}, {"cg_tol", o.cg_tol},
                {"early_stop", o.early_stop}, {"init", o.init}};
    man.input(o.kspace_path);
    man.input(o.coils_path);

    LoadedKspace ks = load_kspace(o.kspace_path, o.height, o.width);
    CoilMapSet maps = load_coil_maps(o.coils_path);
    if (maps.H != ks.H || maps.W != ks.W)
        throw DimensionError("recon: coil maps and k-space grids disagree");
    if (maps.n_coils != ks.y.n_coils)
        throw DimensionError(
            "recon: coil count mismatch (compressed data needs the virtual-coil maps)");
    if (o.init != "zero-filled" && o.init != "zeros")
        throw ConfigError("recon: --init must be 'zero-filled' or 'zeros'");
    man.stage("load_ms");

    RadialSenseOperator A(maps, ks.y.traj);
    const cd* Y = ks.y.data.data();

    CMat X;
    json rm = {{"kind", "recon"}, {"height", ks.H}, {"width", ks.W}, {"method", o.method}};
    std::string trace = "iter,data_term,prior_term,cg_residual\n";

    auto make_init = [&]() -> CMat {
        if (o.init == "zeros") return CMat(A.image_size(), A.n_frames());
        return zero_filled_recon(A, Y, ramp_dcf(ks.y.traj));
    };

    if (o.method == "dae" || o.method == "cg-sense") {
        ReconConfig cfg;
        cfg.lambda = o.method == "cg-sense" ? 0.0 : o.lambda;
        cfg.outer_iters = o.outer;
        cfg.cg_iters = o.cg_iters;
        cfg.cg_tol = o.cg_tol;
        cfg.early_stop = o.early_stop;
        cfg.init = o.init == "zeros" ? ReconInit::Zeros : ReconInit::ZeroFilled;

        DaeParameters theta;
        double gamma = 1.0;
        if (o.method == "dae") {
            if (o.dae_path.empty()) throw ConfigError("recon: --dae required for method dae");
            man.input(o.dae_path);
            LoadedDae d = load_dae(o.dae_path);
            theta = std::move(d.theta);
            gamma = d.gamma;
            if (theta.input_width() != A.n_frames())
                throw DimensionError("recon: denoiser input width != frame count");
        }
        ReconResult res = recon_dae(A, Y, theta, gamma, cfg);
        X = std::move(res.X);
        rm["lambda_used"] = res.lambda_used;
        rm["early_stopped"] = res.early_stopped;
        for (std::size_t k = 0; k < res.data_terms.size(); ++k)
            trace += std::to_string(k) + "," + fmt_g(res.data_terms[k]) + "," +
                     fmt_g(res.prior_terms[k]) + "," + fmt_g(res.cg_residuals[k]) + "\n";
    } else if (o.method == "subspace" || o.method == "penalized-subspace") {
        SubspaceBasis basis;
        if (!o.basis_path.empty()) {
            man.input(o.basis_path);
            std::string mt;
            basis.V = load_cmat(o.basis_path, &mt);
            if (basis.V.rows != A.n_frames())
                throw DimensionError("recon: basis rows != frame count");
        } else if (!o.nav_path.empty()) {
            man.input(o.nav_path);
            NavigatorMatrix nav = load_navigators(o.nav_path);
            if (nav.Z.cols != A.n_frames())
                throw DimensionError("recon: navigator columns != frame count");
            std::vector<std::string> warn;
            basis = estimate_basis(nav, o.rank, &warn);
            for (const auto& w : warn) std::printf("warning: %s\n", w.c_str());
        } else {
            throw ConfigError("recon: subspace methods need --basis or --navigators");
        }
        if (!o.save_basis.empty()) {
            json bm = {{"kind", "basis"},
                       {"singular_values", basis.singular_values},
                       {"source_hash", hex64(basis.source_hash)}};
            save_cmat(o.save_basis, basis.V, bm.dump());
            man.output(o.save_basis);
        }
        rm["rank"] = basis.V.cols;

        CMat x0 = make_init();
        SubspaceReconOptions sopts;
        sopts.cg_tol = o.cg_tol;
        sopts.cg_iters = o.cg_iters;
        sopts.init = &x0;
        CgResult st;
        sopts.stats = &st;
        if (o.method == "subspace") {
            X = subspace_recon(A, Y, basis.V, sopts);
        } else {
            if (o.lambda < 0.0)
                throw ConfigError("recon: penalized-subspace needs --lambda >= 0");
            rm["lambda_used"] = o.lambda;
            X = penalized_subspace_recon(A, Y, basis.V, o.lambda, sopts);
        }
        trace += "0,,," + fmt_g(st.rel_residual) + "\n";
    } else {
        throw ConfigError("recon: unknown --method '" + o.method + "'");
    }
    man.stage("recon_ms");

    save_cmat(o.out, X, rm.dump());
    write_text_atomic(o.out + ".trace.csv", trace);
    man.stage("write_ms");
    man.output(o.out);
    man.output(o.out + ".trace.csv");
    man.write(o.out);

    std::printf("wrote %s [%zu x %zu], method %s\n", o.out.c_str(), X.rows, X.cols,
                o.method.c_str());
    return 0;
}

// ------------------------------------------------------------------- eval --

struct EvalOpts {
    std::string recon_path, ref_path;
    std::size_t height = 0, width = 0;
    int threads = 0;
    std::string out = "metrics.csv";
};

int cmd_eval(const EvalOpts& o) {
    apply_threads(o.threads);
    Manifest man;
    man.command = "eval";
    man.input(o.recon_path);
    man.input(o.ref_path);

    std::string rec_meta_text, ref_meta_text;
    CMat rec = load_cmat(o.recon_path, &rec_meta_text);
    CMat ref = load_cmat(o.ref_path, &ref_meta_text);
    json rec_meta = parse_meta(rec_meta_text);
    json ref_meta = parse_meta(ref_meta_text);

    std::size_t H = o.height, W = o.width;
    if (!H) H = rec_meta.contains("height") ? rec_meta["height"].get<std::size_t>()
             : meta_size(ref_meta, "height");
    if (!W) W = rec_meta.contains("width") ? rec_meta["width"].get<std::size_t>()
             : meta_size(ref_meta, "width");
    man.stage("load_ms");

    MetricReport rep = evaluate_casorati(ref, rec, H, W);
    man.stage("metrics_ms");

    write_text_atomic(o.out, metrics_csv(rep));
    man.stage("write_ms");
    man.output(o.out);
    man.write(o.out);

    std::printf("ser_db %.4f +- %.4f\nssim %.6f +- %.6f\nhfen %.6f +- %.6f\n",
                rep.ser_mean, rep.ser_std, rep.ssim_mean, rep.ssim_std, rep.hfen_mean,
                rep.hfen_std);
    return 0;
}

// ------------------------------------------------------------------ render --

struct RenderOpts {
    std::string in_path;
    long long frame = -1;
    long long profile_row = -1;
    std::size_t height = 0, width = 0;
    std::string out = "frame.pgm";
};

int cmd_render(const RenderOpts& o) {
    Manifest man;
    man.command = "render";
    man.input(o.in_path);

    if ((o.frame < 0) == (o.profile_row < 0))
        throw ConfigError("render: pass exactly one of --frame or --profile-row");

    std::string meta_text;
    CMat X = load_cmat(o.in_path, &meta_text);
    json meta = parse_meta(meta_text);
    const std::size_t H = pick_dim(o.height, meta, "height");
    const std::size_t W = pick_dim(o.width, meta, "width");
    if (H * W != X.rows) throw DimensionError("render: height*width != tensor rows");
    man.stage("load_ms");

    RMat img;
    if (o.frame >= 0) {
        if (static_cast<std::size_t>(o.frame) >= X.cols)
            throw ConfigError("render: --frame out of range");
        img = RMat(H, W);
        for (std::size_t p = 0; p < H * W; ++p)
            img.a[p] = std::abs(X.at(p, static_cast<std::size_t>(o.frame)));
    } else {
        if (static_cast<std::size_t>(o.profile_row) >= H)
            throw ConfigError("render: --profile-row out of range");
        const auto y = static_cast<std::size_t>(o.profile_row);
        img = RMat(W, X.cols);  // spatial line vertical, time horizontal
        for (std::size_t x = 0; x < W; ++x)
            for (std::size_t t = 0; t < X.cols; ++t)
                img.at(x, t) = std::abs(X.at(y * W + x, t));
    }

    double lo = img.a[0], hi = img.a[0];
    for (double v : img.a) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    write_pgm(o.out, img, lo, hi);
    write_text_atomic(o.out + ".window.txt",
                      "magnitude window\nlo " + fmt_g(lo) + "\nhi " + fmt_g(hi) + "\n");
    man.stage("render_ms");
    man.output(o.out);
    man.write(o.out);

    std::printf("wrote %s [%zu x %zu]\n", o.out.c_str(), img.rows, img.cols);
    return 0;
}

// ----------------------------------------------------------------- compare --

struct CompareOpts {
    std::string a_path, b_path;
    double tol = 0.0;
};

int cmd_compare(const CompareOpts& o) {
    Cxt1File a = read_cxt1(o.a_path);
    Cxt1File b = read_cxt1(o.b_path);
    if (a.dtype != b.dtype || a.dims != b.dims) {
        std::printf("mismatch: shapes or dtypes differ\n");
        return 1;
    }
    double num_sq = 0.0, den_sq = 0.0;
    if (a.dtype == 0) {
        for (std::size_t i = 0; i < a.cdata.size(); ++i) {
            num_sq += std::norm(a.cdata[i] - b.cdata[i]);
            den_sq += std::norm(a.cdata[i]);
        }
    } else {
        for (std::size_t i = 0; i < a.rdata.size(); ++i) {
            const double d = a.rdata[i] - b.rdata[i];
            num_sq += d * d;
            den_sq += a.rdata[i] * a.rdata[i];
        }
    }
    const double rel = den_sq > 0.0 ? std::sqrt(num_sq) / std::sqrt(den_sq)
                                    : (num_sq > 0.0 ? INFINITY : 0.0);
    std::printf("rel_frobenius %.12e\n", rel);
    if (rel <= o.tol) return 0;
    std::printf("mismatch: exceeds tolerance %.12e\n", o.tol);
    return 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"self-navigated dynamic MRI reconstruction pipeline"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a key=value file");
    int code = 0;

    auto po = std::make_shared<PhantomOpts>();
    {
        CLI::App* c = app.add_subcommand("phantom", "generate the dynamic phantom and coil maps");
        c->add_option("--height", po->cfg.H)->capture_default_str();
        c->add_option("--width", po->cfg.W)->capture_default_str();
        c->add_option("--frames", po->cfg.n_frames)->capture_default_str();
        c->add_option("--cardiac-period", po->cfg.cardiac_period)->capture_default_str();
        c->add_option("--resp-period", po->cfg.resp_period)->capture_default_str();
        c->add_option("--cardiac-amp", po->cfg.cardiac_amplitude)->capture_default_str();
        c->add_option("--resp-amp", po->cfg.resp_amplitude)->capture_default_str();
        c->add_option("--seed", po->cfg.seed)->capture_default_str();
        c->add_option("--coils", po->coils)->capture_default_str();
        c->add_option("--coil-seed", po->coil_seed)->capture_default_str();
        c->add_option("--threads", po->threads)->capture_default_str();
        c->add_option("--out-phantom", po->out_phantom)->capture_default_str();
        c->add_option("--out-coils", po->out_coils)->capture_default_str();
        c->callback([po, &code] { code = guarded([&] { return cmd_phantom(*po); }); });
    }

    auto ao = std::make_shared<AcquireOpts>();
    {
        CLI::App* c = app.add_subcommand("acquire", "simulate the radial acquisition");
        c->add_option("--phantom", ao->phantom_path)->required();
        c->add_option("--coils", ao->coils_path)->required();
        c->add_option("--spokes", ao->spokes, "spokes per frame incl. 2 navigators")
            ->capture_default_str();
        c->add_option("--readout", ao->readout, "0 = 2*max(H,W)")->capture_default_str();
        c->add_option("--noise", ao->noise)->capture_default_str();
        c->add_option("--seed", ao->seed)->capture_default_str();
        c->add_option("--compress", ao->compress, "virtual coil count, 0 = off")
            ->capture_default_str();
        c->add_option("--threads", ao->threads)->capture_default_str();
        c->add_option("--out-kspace", ao->out_kspace)->capture_default_str();
        c->add_option("--out-navigators", ao->out_nav)->capture_default_str();
        c->callback([ao, &code] { code = guarded([&] { return cmd_acquire(*ao); }); });
    }

    auto to = std::make_shared<TrainOpts>();
    {
        CLI::App* c = app.add_subcommand("train-dae", "train the navigator denoiser");
        c->add_option("--navigators", to->nav_path)->required();
        c->add_option("--epochs", to->cfg.epochs)->capture_default_str();
        c->add_option("--batch", to->cfg.batch)->capture_default_str();
        c->add_option("--lr", to->cfg.lr)->capture_default_str();
        c->add_option("--seed", to->cfg.seed)->capture_default_str();
        c->add_option("--bottleneck", to->cfg.bottleneck_override, "0 = automatic rule")
            ->capture_default_str();
        c->add_option("--threads", to->threads)->capture_default_str();
        c->add_option("--out", to->out)->capture_default_str();
        c->callback([to, &code] { code = guarded([&] { return cmd_train_dae(*to); }); });
    }

    auto ro = std::make_shared<ReconOpts>();
    {
        CLI::App* c = app.add_subcommand("recon", "reconstruct the dynamic series");
        c->add_option("--kspace", ro->kspace_path)->required();
        c->add_option("--coils", ro->coils_path)->required();
        c->add_option("--method", ro->method,
                      "dae | subspace | penalized-subspace | cg-sense")
            ->capture_default_str();
        c->add_option("--dae", ro->dae_path);
        c->add_option("--basis", ro->basis_path);
        c->add_option("--navigators", ro->nav_path);
        c->add_option("--lambda", ro->lambda, "regularization (dae: <0 = auto)")
            ->capture_default_str();
        c->add_option("--rank", ro->rank)->capture_default_str();
        c->add_option("--outer", ro->outer)->capture_default_str();
        c->add_option("--cg-iters", ro->cg_iters)->capture_default_str();
        c->add_option("--cg-tol", ro->cg_tol)->capture_default_str();
        c->add_option("--early-stop", ro->early_stop)->capture_default_str();
        c->add_option("--init", ro->init, "zero-filled | zeros")->capture_default_str();
        c->add_option("--height", ro->height)->capture_default_str();
        c->add_option("--width", ro->width)->capture_default_str();
        c->add_option("--threads", ro->threads)->capture_default_str();
        c->add_option("--out", ro->out)->capture_default_str();
        c->add_option("--save-basis", ro->save_basis);
        c->callback([ro, &code] { code = guarded([&] { return cmd_recon(*ro); }); });
    }

    auto eo = std::make_shared<EvalOpts>();
    {
        CLI::App* c = app.add_subcommand("eval", "score a reconstruction against a reference");
        c->add_option("--recon", eo->recon_path)->required();
        c->add_option("--ref", eo->ref_path)->required();
        c->add_option("--height", eo->height)->capture_default_str();
        c->add_option("--width", eo->width)->capture_default_str();
        c->add_option("--threads", eo->threads)->capture_default_str();
        c->add_option("--out", eo->out)->capture_default_str();
        c->callback([eo, &code] { code = guarded([&] { return cmd_eval(*eo); }); });
    }

    auto no = std::make_shared<RenderOpts>();
    {
        CLI::App* c = app.add_subcommand("render", "emit PGM frame or time-profile images");
        c->add_option("--in", no->in_path)->required();
        c->add_option("--frame", no->frame, "frame index to render")->capture_default_str();
        c->add_option("--profile-row", no->profile_row, "image row for an x-t profile")
            ->capture_default_str();
        c->add_option("--height", no->height)->capture_default_str();
        c->add_option("--width", no->width)->capture_default_str();
        c->add_option("--out", no->out)->capture_default_str();
        c->callback([no, &code] { code = guarded([&] { return cmd_render(*no); }); });
    }

    auto co = std::make_shared<CompareOpts>();
    {
        CLI::App* c = app.add_subcommand("compare", "relative Frobenius diff of two tensors");
        c->add_option("a", co->a_path)->required();
        c->add_option("b", co->b_path)->required();
        c->add_option("--tol", co->tol)->capture_default_str();
        c->callback([co, &code] { code = guarded([&] { return cmd_compare(*co); }); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    return code;
}

}  // namespace navrec
