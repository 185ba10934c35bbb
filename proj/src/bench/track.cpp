#include <algorithm>
#include <cmath>

#include "cflb/bench.hpp"
#include "cflb/error.hpp"
#include "cflb/io.hpp"

namespace cflb::bench {
namespace {

struct Sequence {
    std::vector<Signal2D> frames;
    std::vector<Point> truth;
    BBox init;
};

Sequence load_sequence(const TrackConfig& c) {
    if (!c.frames_dir) {
        auto s = synth::tracking_sequence(c.synthetic);
        return {std::move(s.frames), std::move(s.truth), c.init.value_or(s.init)};
    }
    namespace fs = std::filesystem;
    if (!fs::is_directory(*c.frames_dir)) throw IoError("track: frames directory not found: " + c.frames_dir->string());
    Sequence s;
    for (const auto& f : io::list_frames(*c.frames_dir)) {
        s.frames.push_back(io::read_image(f));
        if (s.frames.back().shape() != s.frames.front().shape()) {
            throw InvalidArgument("track: frame " + f.filename().string() + " differs in size from the first frame");
        }
    }
    if (s.frames.empty()) throw IoError("track: no frames in " + c.frames_dir->string());

    const fs::path gt_path = c.groundtruth.value_or(c.frames_dir->parent_path() / "groundtruth.csv");
    const auto rows = io::read_ground_truth(gt_path);
    if (rows.size() != s.frames.size()) {
        throw InvalidArgument("track: ground truth has " + std::to_string(rows.size()) + " rows for " +
                              std::to_string(s.frames.size()) + " frames");
    }
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k].frame <= rows[k - 1].frame) throw InvalidArgument("track: ground-truth frame indices must increase");
    }
    for (const auto& r : rows) s.truth.push_back(r.center);

    if (c.init) {
        s.init = *c.init;
    } else if (fs::exists(c.frames_dir->parent_path() / "init_bbox.txt")) {
        s.init = synth::read_bbox(c.frames_dir->parent_path() / "init_bbox.txt");
    } else if (rows.front().size) {
        const Shape sz = *rows.front().size;
        s.init = {static_cast<int>(std::lround(rows.front().center.row)) - sz.height / 2,
                  static_cast<int>(std::lround(rows.front().center.col)) - sz.width / 2, sz.height, sz.width};
    } else {
        throw InvalidArgument("track: no first-frame box (pass --bbox, add init_bbox.txt or sizes to the ground truth)");
    }
    return s;
}

}  // namespace

void TrackConfig::validate() const {
    tracker.validate();
    for (int k : admm_sweep) {
        if (k < 1) throw InvalidArgument("track: admm-sweep entries must be positive");
    }
    if (thresholds.empty()) throw InvalidArgument("track: thresholds must be non-empty");
    if (dump_every < 0) throw InvalidArgument("track: dump-every must be >= 0");
    if (init && (init->height < 2 || init->width < 2)) throw InvalidArgument("track: bbox must be at least 2x2");
}

TrackOutput track_bench(const TrackConfig& c) {
    c.validate();
    const Sequence seq = load_sequence(c);
    const std::vector<int> sweep = c.admm_sweep.empty() ? std::vector<int>{c.tracker.admm_iters} : c.admm_sweep;

    TrackOutput out;
    Report& rep = out.report;
    rep.command = "track-bench";
    Table summary{"summary", {"admm_iters", "frames", "precision_at_20", "mean_error", "fps", "seconds_s"}, {}};
    Table curve{"precision_curve", {"admm_iters", "threshold", "precision"}, {}};
    Table per_frame{"per_frame",
                    {"admm_iters", "frame", "pred_row", "pred_col", "truth_row", "truth_col", "error", "psr", "seconds_s"},
                    {}};
    json runs = json::array();
    const std::vector<double> at20{20.0};
    for (std::size_t s = 0; s < sweep.size(); ++s) {
        TrackerParams p = c.tracker;
        p.admm_iters = sweep[s];
        const TrackRecord rec = run_tracker(seq.frames, seq.init, p, seq.truth, s == 0 ? c.dump_every : 0);
        const PrecisionReport pr = precision_curve(rec, c.thresholds);
        const double p20 = precision_curve(rec, at20).curve.front().second;
        double total = 0.0;
        json errors = json::array(), psrs = json::array(), secs = json::array(), pred = json::array();
        for (const auto& f : rec.frames) {
            total += f.seconds;
            errors.push_back(f.error);
            psrs.push_back(f.psr);
            secs.push_back(f.seconds);
            pred.push_back({f.predicted.row, f.predicted.col});
            per_frame.rows.push_back({sweep[s], f.index, f.predicted.row, f.predicted.col, f.truth->row, f.truth->col,
                                      f.error, f.psr, f.seconds});
        }
        summary.rows.push_back({sweep[s], static_cast<int>(rec.frames.size()), p20, pr.mean_error, pr.fps, total});
        for (const auto& [t, v] : pr.curve) curve.rows.push_back({sweep[s], t, v});
        runs.push_back({{"admm_iters", sweep[s]}, {"errors", errors}, {"psr", psrs}, {"seconds_s", secs}, {"predicted", pred}});
        if (s == 0) {
            out.dumps = rec.dumps;
            out.dump_frames = rec.dump_frames;
        }
    }
    json truth = json::array();
    for (const auto& t : seq.truth) truth.push_back({t.row, t.col});
    rep.raw = {{"init_bbox", {seq.init.row, seq.init.col, seq.init.height, seq.init.width}},
               {"truth", truth},
               {"runs", runs}};
    rep.tables = {summary, curve, per_frame};
    return out;
}

}  // namespace cflb::bench
