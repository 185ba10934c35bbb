// cflb command-line tool: training, benchmarks and synthetic data.
//
// Exit codes: 0 success, 2 input error, 3 numerical/solver error, 1 anything else.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cflb/bench.hpp"
#include "cflb/error.hpp"
#include "cflb/io.hpp"
#include "cflb/solvers.hpp"
#include "cflb/synth.hpp"
#include "options.hpp"

namespace fs = std::filesystem;
using cflb::cli::json;
using cflb::cli::OptionSet;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Globals {
    std::string config;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir = "cflb_out";
};

cflb::PenaltyUnits parse_units(const std::string& s) {
    if (s == "relative") return cflb::PenaltyUnits::relative;
    if (s == "absolute") return cflb::PenaltyUnits::absolute;
    throw cflb::InvalidArgument("penalty-units must be 'relative' or 'absolute', got '" + s + "'");
}

struct AdmmOpts {
    cflb::AdmmParams params;
    std::string units = "relative";
    double change_tol = -1.0;

    void bind(OptionSet& set, CLI::App* app) {
        set.add(app, "mu0", params.mu0, "initial ADMM penalty");
        set.add(app, "beta", params.beta, "penalty growth factor");
        set.add(app, "mu-max", params.mu_max, "penalty ceiling");
        set.add(app, "max-iters", params.max_iters, "ADMM iteration cap");
        set.add(app, "rel-tol", params.rel_tol, "stop when the relative primal residual falls below this");
        set.add(app, "penalty-units", units, "relative (x mean auto-energy) or absolute");
        set.add(app, "change-tol", change_tol, "also require a relative step in h below this (negative: off)");
    }
    [[nodiscard]] cflb::AdmmParams resolve() const {
        cflb::AdmmParams p = params;
        p.units = parse_units(units);
        if (change_tol >= 0.0) p.change_tol = change_tol;
        return p;
    }
};

// ---------------------------------------------------------------------------

struct TrainOpts {
    std::string input;
    std::string output;
    std::string solver = "cflb";
    int filter_size = 0;
    int window = 0;
    bool mask_equals_image = false;
    double lambda = 1e-2;
    double sigma = 2.0;
    AdmmOpts admm;

    void bind(OptionSet& set, CLI::App* app) {
        set.add(app, "input", input, "directory of training images (annotations.csv optional)");
        set.add(app, "output", output, "model path (default <out-dir>/model.cflb)");
        set.add(app, "solver", solver, "mosse or cflb");
        set.add(app, "filter-size", filter_size, "square filter side D (cflb; default window/2)");
        set.add(app, "window", window, "square training window side T (default: whole image, or 2D when annotated)");
        set.flag(app, "mask-equals-image", mask_equals_image, "cflb with the mask covering the whole window");
        set.add(app, "lambda", lambda, "ridge weight");
        set.add(app, "sigma", sigma, "desired-response Gaussian sigma");
        admm.bind(set, app);
    }
};

struct Window {
    cflb::Signal2D x;
    cflb::Pixel center;
};

std::vector<Window> training_windows(const TrainOpts& o) {
    const fs::path dir(o.input);
    if (o.input.empty()) throw cflb::InvalidArgument("train: --input is required");
    if (!fs::is_directory(dir)) throw cflb::IoError("train: input directory not found: " + o.input);
    std::vector<Window> out;
    if (fs::exists(dir / "annotations.csv")) {
        const int d = o.filter_size > 0 ? o.filter_size : 32;
        const bool whole = o.solver == "mosse" || o.mask_equals_image;
        const int t = o.window > 0 ? o.window : (whole ? d : 2 * d);
        for (const auto& s : cflb::synth::read_localization_set(dir)) {
            out.push_back({cflb::extract_window(s.image, s.target, {t, t}), {t / 2, t / 2}});
        }
        return out;
    }
    for (const auto& f : cflb::io::list_frames(dir)) {
        cflb::Signal2D img = cflb::io::read_image(f);
        if (o.window > 0) img = cflb::extract_window(img, {img.height() / 2, img.width() / 2}, {o.window, o.window});
        if (!out.empty() && img.shape() != out.front().x.shape()) {
            throw cflb::InvalidArgument("train: " + f.filename().string() + " differs in size from the first image");
        }
        const cflb::Pixel c{img.height() / 2, img.width() / 2};
        out.push_back({std::move(img), c});
    }
    if (out.empty()) throw cflb::IoError("train: no .pgm/.png images in " + o.input);
    return out;
}

cflb::bench::Report cmd_train(const TrainOpts& o, const Globals& g) {
    using clock = std::chrono::steady_clock;
    if (o.solver != "mosse" && o.solver != "cflb") throw cflb::InvalidArgument("train: --solver must be mosse or cflb");
    if (!(o.lambda > 0.0) || !(o.sigma > 0.0)) throw cflb::InvalidArgument("train: lambda and sigma must be positive");
    const auto windows = training_windows(o);
    const cflb::Shape shape = windows.front().x.shape();

    cflb::MaskSpec mask = cflb::MaskSpec::identity(shape);
    if (o.solver == "cflb" && !o.mask_equals_image) {
        const int d = o.filter_size > 0 ? o.filter_size : std::min(shape.height, shape.width) / 2;
        mask = cflb::MaskSpec::centered(shape, {d, d});
        mask.validate();
    }

    std::vector<cflb::Signal2D> xs;
    std::vector<cflb::Signal2D> ys;
    for (const auto& w : windows) {
        xs.push_back(cflb::preprocess_or_zero(w.x));
        ys.push_back(cflb::anchored_response(mask, w.center, o.sigma));
    }

    cflb::bench::Report rep;
    rep.command = "train";
    cflb::bench::Table trace{"trace", {"iteration", "objective", "relative_residual", "mu", "seconds_s"}, {}};
    const auto t0 = clock::now();
    cflb::FilterModel model;
    double precompute_s = 0.0;
    if (o.solver == "mosse") {
        model = cflb::mosse_train(xs, ys, o.lambda);
        precompute_s = std::chrono::duration<double>(clock::now() - t0).count();
        trace.rows.push_back({0, cflb::masked_objective(model.energies, mask, o.lambda, model.h), nullptr, nullptr, precompute_s});
    } else {
        const cflb::SpectralEnergies e = cflb::spectral_energies(xs, ys);
        precompute_s = std::chrono::duration<double>(clock::now() - t0).count();
        const auto res = cflb::cflb_admm_solve(e, mask, o.lambda, o.admm.resolve());
        for (std::size_t k = 0; k < res.state.trace.size(); ++k) {
            const auto& it = res.state.trace[k];
            trace.rows.push_back({static_cast<int>(k) + 1, it.objective, it.relative_residual, it.mu, it.seconds});
        }
        model = res.model;
        rep.raw["converged"] = res.state.converged;
    }
    const double total_s = std::chrono::duration<double>(clock::now() - t0).count();

    const fs::path out_path = o.output.empty() ? fs::path(g.out_dir) / "model.cflb" : fs::path(o.output);
    if (out_path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(out_path.parent_path(), ec);
        if (ec) throw cflb::IoError("train: cannot create " + out_path.parent_path().string());
    }
    cflb::io::save_model(out_path, model);

    json objective = json::array();
    for (const auto& row : trace.rows) objective.push_back(row[1]);
    rep.raw["objective"] = objective;
    rep.raw["samples"] = static_cast<int>(xs.size());
    rep.raw["model_path"] = out_path.string();
    rep.tables.push_back(trace);
    rep.tables.push_back({"timing", {"precompute_s", "total_s"}, {{precompute_s, total_s}}});
    return rep;
}

// ---------------------------------------------------------------------------

struct SuiteOpts {
    cflb::synth::LocalizationSuiteParams p;

    void bind(OptionSet& set, CLI::App* app) {
        set.add(app, "image-size", p.image_size, "synthetic image side");
        set.add(app, "template-size", p.template_size, "planted template side");
        set.add(app, "clutter", p.clutter, "background clutter std");
        set.add(app, "distractor-contrast", p.distractor_contrast, "reference and distractor amplitude");
        set.add(app, "distractors", p.distractors, "distractor copies per image");
        set.add(app, "noise", p.noise, "white-noise std");
        set.add(app, "jitter", p.jitter, "target position jitter (px)");
    }
};

struct LocalizeOpts {
    cflb::bench::LocalizeConfig c;
    SuiteOpts suite;
    std::string data_dir;
    AdmmOpts admm;

    LocalizeOpts() { admm.params = c.admm; }

    void bind(OptionSet& set, CLI::App* app) {
        set.add(app, "data-dir", data_dir, "annotated dataset (synth layout); synthetic when empty");
        set.add(app, "filter-size", c.filter_size, "filter side D");
        set.add(app, "ratios", c.ratios, "T/D ratios");
        set.add(app, "train-sizes", c.train_sizes, "training-set sizes N");
        set.add(app, "test-count", c.test_count, "test images per run");
        set.add(app, "runs", c.runs, "random runs averaged");
        set.add(app, "lambda", c.lambda, "ridge weight");
        set.add(app, "sigma", c.sigma, "desired-response sigma");
        set.add(app, "thresholds", c.thresholds, "normalised-distance thresholds");
        set.add(app, "report-threshold", c.report_threshold, "threshold for the vs-N and vs-T/D tables");
        suite.bind(set, app);
        admm.bind(set, app);
    }
    cflb::bench::LocalizeConfig resolve(const Globals& g) const {
        auto out = c;
        out.suite = suite.p;
        out.suite.seed = g.seed;
        out.threads = g.threads;
        out.admm = admm.resolve();
        if (!data_dir.empty()) {
            if (!fs::is_directory(data_dir)) throw cflb::IoError("localize-bench: data directory not found: " + data_dir);
            out.data_dir = data_dir;
        }
        return out;
    }
};

struct ConvergenceOpts {
    cflb::bench::ConvergenceConfig c;
    AdmmOpts admm;
    int oracle_max_elements = 256;

    ConvergenceOpts() { admm.params = c.admm; }

    void bind(OptionSet& set, CLI::App* app) {
        set.add(app, "window", c.window, "window side T");
        set.add(app, "filter", c.filter, "filter side D");
        set.add(app, "sizes", c.sizes, "training-set sizes N");
        set.add(app, "instances", c.instances, "random instances per N");
        set.add(app, "lambda", c.lambda, "ridge weight");
        set.add(app, "objective-tol", c.objective_tol, "relative objective gap counted as converged");
        set.add(app, "gd-iters", c.gd_iters, "gradient-descent iterations");
        set.add(app, "gd-step", c.gd_step, "gradient-descent step (0: 1/L)");
        set.add(app, "oracle-max-elements", oracle_max_elements, "largest D solved by the dense oracle");
        set.add(app, "reference-iters", c.reference_iters, "ADMM iterations for the reference when D is too large");
        admm.bind(set, app);
    }
    cflb::bench::ConvergenceConfig resolve(const Globals& g) const {
        auto out = c;
        out.seed = g.seed;
        out.threads = g.threads;
        out.admm = admm.resolve();
        if (oracle_max_elements < 0) throw cflb::InvalidArgument("convergence-bench: oracle-max-elements must be >= 0");
        out.oracle_max_elements = static_cast<std::size_t>(oracle_max_elements);
        return out;
    }
};

struct TrackSynthOpts {
    cflb::synth::TrackingSequenceParams p;
    std::vector<double> start{p.start.row, p.start.col};
    std::vector<double> velocity{p.velocity.row, p.velocity.col};

    void bind(OptionSet& set, CLI::App* app, const std::string& prefix) {
        set.add(app, prefix + "frame-height", p.frame_height, "frame height");
        set.add(app, prefix + "frame-width", p.frame_width, "frame width");
        set.add(app, prefix + "target-size", p.target_size, "target side");
        set.add(app, prefix + "frames", p.frames, "frame count");
        set.add(app, prefix + "start", start, "first-frame target centre row,col");
        set.add(app, prefix + "velocity", velocity, "per-frame motion row,col");
        set.add(app, prefix + "clutter", p.clutter, "background clutter std");
        set.add(app, prefix + "noise", p.noise, "white-noise std");
    }
    cflb::synth::TrackingSequenceParams resolve(std::uint64_t seed) const {
        if (start.size() != 2 || velocity.size() != 2) throw cflb::InvalidArgument("start and velocity take two values");
        auto out = p;
        out.start = {start[0], start[1]};
        out.velocity = {velocity[0], velocity[1]};
        out.seed = seed;
        return out;
    }
};

struct TrackOpts {
    cflb::bench::TrackConfig c;
    TrackSynthOpts synthetic;
    std::string frames_dir;
    std::string groundtruth;
    std::vector<int> bbox;
    AdmmOpts admm;

    void bind(OptionSet& set, CLI::App* app) {
        set.add(app, "frames-dir", frames_dir, "frame directory; synthetic sequence when empty");
        set.add(app, "groundtruth", groundtruth, "ground-truth table (default <frames-dir>/../groundtruth.csv)");
        set.add(app, "bbox", bbox, "first-frame box row,col,height,width");
        set.add(app, "eta", c.tracker.eta, "online learning rate");
        set.add(app, "lambda", c.tracker.lambda, "ridge weight");
        set.add(app, "admm-iters", c.tracker.admm_iters, "ADMM iterations per frame");
        set.add(app, "admm-sweep", c.admm_sweep, "run once per listed per-frame iteration count");
        set.add(app, "sigma-divisor", c.tracker.sigma_divisor, "response sigma = sqrt(mn) / this");
        set.add(app, "search-scale", c.tracker.search_scale, "search window side / target side");
        set.add(app, "init-perturbations", c.tracker.init_perturbations, "perturbed first-frame samples");
        set.add(app, "init-admm-iters", c.tracker.init_admm_iters, "ADMM budget for the first filter");
        set.add(app, "init-rel-tol", c.tracker.init_rel_tol, "tolerance for the first filter");
        set.add(app, "exact-init", c.tracker.exact_init, "start the first solve at the dense minimiser (true/false)");
        set.add(app, "thresholds", c.thresholds, "precision-curve thresholds (px)");
        set.add(app, "dump-every", c.dump_every, "write response maps every k frames (0: never)");
        synthetic.bind(set, app, "synth-");
        admm.bind(set, app);
    }
    cflb::bench::TrackConfig resolve(const Globals& g) const {
        auto out = c;
        out.tracker.seed = g.seed;
        out.tracker.admm = admm.resolve();
        out.synthetic = synthetic.resolve(g.seed);
        if (!frames_dir.empty()) out.frames_dir = frames_dir;
        if (!groundtruth.empty()) out.groundtruth = groundtruth;
        if (!bbox.empty()) {
            if (bbox.size() != 4) throw cflb::InvalidArgument("bbox takes row,col,height,width");
            out.init = cflb::BBox{bbox[0], bbox[1], bbox[2], bbox[3]};
        }
        return out;
    }
};

struct SynthOpts {
    std::string kind = "both";
    int count = 220;
    SuiteOpts suite;
    TrackSynthOpts tracking;

    void bind(OptionSet& set, CLI::App* app) {
        set.add(app, "kind", kind, "localization, tracking or both");
        set.add(app, "count", count, "localisation images");
        suite.bind(set, app);
        tracking.bind(set, app, "track-");
    }
};

void cmd_synth(const SynthOpts& o, const Globals& g) {
    if (o.kind != "localization" && o.kind != "tracking" && o.kind != "both") {
        throw cflb::InvalidArgument("synth: --kind must be localization, tracking or both");
    }
    if (o.count < 1) throw cflb::InvalidArgument("synth: --count must be positive");
    const fs::path root(g.out_dir);
    if (o.kind != "tracking") {
        auto p = o.suite.p;
        p.seed = g.seed;
        cflb::synth::write_localization_set(root / "localization", cflb::synth::localization_set(p, o.count));
    }
    if (o.kind != "localization") {
        cflb::synth::write_tracking_sequence(root / "tracking", cflb::synth::tracking_sequence(o.tracking.resolve(g.seed)));
    }
}

void write_dumps(const fs::path& dir, const cflb::bench::TrackOutput& out) {
    if (out.dumps.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw cflb::IoError("cannot create " + dir.string());
    for (std::size_t k = 0; k < out.dumps.size(); ++k) {
        // Min-max scaled for viewing.
        cflb::Signal2D r = out.dumps[k].response;
        const auto v = r.samples();
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double a = *lo;
        const double span = *hi - *lo;
        for (auto& x : v) x = span > 0 ? (x - a) / span : 0.0;
        std::ostringstream name;
        name << "response_" << std::setw(4) << std::setfill('0') << out.dump_frames[k] << ".pgm";
        cflb::io::write_pgm(dir / name.str(), r);
    }
}

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cflb::IoError("cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw cflb::InvalidArgument("config " + path + ": " + e.what());
    }
}

// Routes each key of the config file to the global or the command option set.
void apply_config(const json& cfg, OptionSet& globals, OptionSet& command) {
    if (!cfg.is_object()) throw cflb::InvalidArgument("config: top level must be an object");
    for (const auto& [key, value] : cfg.items()) {
        if (globals.has(key)) {
            globals.set(key, value);
        } else if (command.has(key)) {
            command.set(key, value);
        } else {
            throw cflb::InvalidArgument("config: unknown key '" + key + "'");
        }
    }
    globals.reapply_given();
    command.reapply_given();
}

json echo(const OptionSet& globals, const OptionSet& command) {
    json out = command.dump();
    const json g = globals.dump();
    for (const auto& [k, v] : g.items()) out[k] = v;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlation filters with limited boundaries: training, benchmarks and synthetic data"};
    app.require_subcommand(1);

    Globals g;
    OptionSet globals;
    app.add_option("--config", g.config, "JSON file with the same keys as the flags; flags override it");
    globals.add(&app, "seed", g.seed, "master seed");
    globals.add(&app, "threads", g.threads, "worker threads for independent benchmark cells");
    globals.add(&app, "out-dir", g.out_dir, "directory for reports, tables and generated data");

    TrainOpts train;
    LocalizeOpts localize;
    ConvergenceOpts convergence;
    TrackOpts track;
    SynthOpts synth;
    OptionSet train_set, localize_set, convergence_set, track_set, synth_set;

    auto* train_cmd = app.add_subcommand("train", "train a MOSSE or CFLB filter and write the model file");
    auto* localize_cmd = app.add_subcommand("localize-bench", "localisation rate vs threshold, N and T/D");
    auto* convergence_cmd = app.add_subcommand("convergence-bench", "ADMM vs gradient descent convergence and timing");
    auto* track_cmd = app.add_subcommand("track-bench", "run the tracker against ground truth");
    auto* synth_cmd = app.add_subcommand("synth", "write synthetic localisation and tracking datasets");
    for (auto* sub : {train_cmd, localize_cmd, convergence_cmd, track_cmd, synth_cmd}) sub->fallthrough();
    train.bind(train_set, train_cmd);
    localize.bind(localize_set, localize_cmd);
    convergence.bind(convergence_set, convergence_cmd);
    track.bind(track_set, track_cmd);
    synth.bind(synth_set, synth_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        OptionSet* command = train_cmd->parsed()         ? &train_set
                             : localize_cmd->parsed()    ? &localize_set
                             : convergence_cmd->parsed() ? &convergence_set
                             : track_cmd->parsed()       ? &track_set
                                                         : &synth_set;
        if (!g.config.empty()) {
            json cfg = read_config_file(g.config);
            // A whole report is accepted too; its embedded config is used.
            if (cfg.is_object() && cfg.contains("command") && cfg.contains("config")) {
                if (cfg["command"] != app.get_subcommands().front()->get_name()) {
                    throw cflb::InvalidArgument("config: report was produced by '" + cfg["command"].dump() + "'");
                }
                cfg = cfg["config"];
            }
            apply_config(cfg, globals, *command);
        }
        if (g.threads < 1) throw cflb::InvalidArgument("--threads must be positive");

        cflb::bench::Report rep;
        if (train_cmd->parsed()) {
            rep = cmd_train(train, g);
        } else if (localize_cmd->parsed()) {
            rep = cflb::bench::localize_bench(localize.resolve(g));
        } else if (convergence_cmd->parsed()) {
            rep = cflb::bench::convergence_bench(convergence.resolve(g));
        } else if (track_cmd->parsed()) {
            auto out = cflb::bench::track_bench(track.resolve(g));
            write_dumps(fs::path(g.out_dir) / "responses", out);
            rep = std::move(out.report);
        } else {
            cmd_synth(synth, g);
            std::cout << "wrote synthetic data under " << g.out_dir << '\n';
            return 0;
        }
        rep.config = echo(globals, *command);
        rep.write(g.out_dir, g.threads);
        for (const auto& t : rep.tables) {
            if (t.name == "summary" || t.name == "rate_vs_ratio" || t.name == "timing") {
                std::cout << t.name << '\n';
                for (std::size_t c = 0; c < t.columns.size(); ++c) std::cout << (c ? "," : "") << t.columns[c];
                std::cout << '\n';
                for (const auto& row : t.rows) {
                    for (std::size_t c = 0; c < row.size(); ++c) std::cout << (c ? "," : "") << row[c].dump();
                    std::cout << '\n';
                }
            }
        }
        std::cout << "report: " << (fs::path(g.out_dir) / (rep.command + ".json")).string() << '\n';
        return 0;
    } catch (const cflb::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const cflb::Error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
