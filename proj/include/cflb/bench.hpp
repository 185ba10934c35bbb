#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cflb/solvers.hpp"
#include "cflb/synth.hpp"
#include "cflb/track.hpp"

namespace cflb::bench {

using json = nlohmann::json;

/// Rectangular metric table; cells are numbers or strings.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    [[nodiscard]] json to_json() const;
    void write_csv(const std::filesystem::path& path) const;
};

/// What every harness returns. `config` is filled by the caller (the CLI echoes
/// its flat option map there); `raw` holds the traces every table is derived from.
struct Report {
    std::string command;
    json config = json::object();
    json raw = json::object();
    std::vector<Table> tables;

    [[nodiscard]] const Table& table(const std::string& name) const;
    /// Config, environment stamp, tables and raw traces. Timings live only in
    /// tables/raw fields whose names end in "_s" or "fps".
    [[nodiscard]] json to_json(int threads) const;
    /// Writes <dir>/<command>.json and <dir>/<command>_<table>.csv for each table.
    void write(const std::filesystem::path& dir, int threads) const;
};

/// Thresholds lo, lo + step, ..., hi (inclusive, robust to rounding).
std::vector<double> threshold_grid(double lo, double hi, double step);

// ---------------------------------------------------------------------------

struct LocalizeConfig {
    synth::LocalizationSuiteParams suite;  // suite.seed is the master seed
    std::optional<std::filesystem::path> data_dir;  // on-disk set instead of synthetic
    int filter_size = 32;
    std::vector<double> ratios{1.0, 1.5, 2.0};
    std::vector<int> train_sizes{5, 10, 20};
    int test_count = 200;
    int runs = 1;
    double lambda = 1e-2;
    double sigma = 2.0;
    AdmmParams admm = [] {
        AdmmParams a;
        a.max_iters = 100;
        a.rel_tol = 1e-5;
        return a;
    }();
    std::vector<double> thresholds = threshold_grid(0.01, 0.25, 0.01);
    double report_threshold = 0.1;
    int threads = 1;

    void validate() const;
};

/// Localisation distances of one trained filter on the test images.
struct LocalizeCell {
    int run = 0;
    double ratio = 0.0;
    int window = 0;
    int train_size = 0;
    std::string solver;
    std::vector<double> distances;
};

/// Per (run, T/D, N) cell: train on windows around annotated targets, localise on
/// full test images, score by distance normalised by the reference separation.
/// Tables: rate_vs_threshold, rate_vs_train_size, rate_vs_ratio.
Report localize_bench(const LocalizeConfig& config);

/// Fraction of distances <= threshold.
double success_rate(const std::vector<double>& distances, double threshold);

// ---------------------------------------------------------------------------

struct ConvergenceConfig {
    std::uint64_t seed = 0;
    int window = 16;
    int filter = 8;
    std::vector<int> sizes{8, 64};
    int instances = 3;
    double lambda = 1e-2;
    /// max_iters bounds the traced run; rel_tol only defines iterations-to-rel-tol
    /// (the run never stops early so the traces have equal length).
    AdmmParams admm;
    double objective_tol = 1e-3;
    int gd_iters = 500;
    double gd_step = 0.0;  // 0 selects gradient_descent_safe_step
    std::size_t oracle_max_elements = 256;
    int reference_iters = 2000;
    int threads = 1;

    void validate() const;
};

/// Synthetic convergence instance: smoothed-noise windows, preprocessed, with the
/// anchored Gaussian at the window centre (sigma = sqrt(T)/16).
RegularizedProblem convergence_instance(const ConvergenceConfig& config, int n, int instance);

/// Tables: summary (per N), traces (per N, instance, iteration).
Report convergence_bench(const ConvergenceConfig& config);

// ---------------------------------------------------------------------------

struct TrackConfig {
    std::optional<std::filesystem::path> frames_dir;
    std::optional<std::filesystem::path> groundtruth;
    std::optional<BBox> init;  // required with frames_dir unless init_bbox.txt is next to it
    synth::TrackingSequenceParams synthetic;
    TrackerParams tracker;
    std::vector<int> admm_sweep;  // empty: tracker.admm_iters only
    std::vector<double> thresholds = threshold_grid(1.0, 50.0, 1.0);
    int dump_every = 0;

    void validate() const;
};

struct TrackOutput {
    Report report;
    /// Response maps of the first sweep entry, with their frame indices.
    std::vector<ResponseMap> dumps;
    std::vector<int> dump_frames;
};

/// Tables: summary (per admm_iters), precision_curve, per_frame.
TrackOutput track_bench(const TrackConfig& config);

}  // namespace cflb::bench
