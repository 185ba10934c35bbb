#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cflb/detect.hpp"
#include "cflb/solvers.hpp"

namespace cflb {

/// Axis-aligned box in frame coordinates (top-left row/col plus size).
struct BBox {
    int row = 0;
    int col = 0;
    int height = 0;
    int width = 0;

    [[nodiscard]] Pixel center() const noexcept { return {row + height / 2, col + width / 2}; }
    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Sub-pixel location (ground truth may be fractional).
struct Point {
    double row = 0.0;
    double col = 0.0;
};

struct TrackerParams {
    double eta = 0.025;
    double lambda = 1e-2;
    int admm_iters = 4;
    /// Response sigma = sqrt(height * width) / sigma_divisor.
    double sigma_divisor = 16.0;
    double search_scale = 2.0;
    int init_perturbations = 8;
    std::uint64_t seed = 0;

    /// Budget for the first filter, solved to `init_rel_tol` so that later warm
    /// starts begin at a fixed point.
    int init_admm_iters = 500;
    double init_rel_tol = 1e-12;
    /// Seed the first solve with the dense minimiser when the filter has at most
    /// kOracleMaxElements elements.
    bool exact_init = true;
    /// Penalty schedule shared by initial and per-frame solves; max_iters/rel_tol
    /// are overridden by the fields above.
    AdmmParams admm;

    double max_rotation_deg = 5.0;
    double max_scale_delta = 0.05;
    int max_translation = 2;
    int psr_radius = 5;

    void validate() const;
};

struct TrackerState {
    TrackerParams params;
    FilterModel model;
    AdmmState solver;
    BBox bbox;
    Shape frame_shape;
    int frame_index = 0;
    double last_psr = 0.0;
    double sigma = 0.0;
    Signal2D target_response;  // anchored training response, fixed after init
};

struct StepResult {
    TrackerState state;
    Pixel center;
    double psr = 0.0;
};

/// Window of `shape` centred on `center`; out-of-frame samples replicate the border.
Signal2D extract_window(const Signal2D& frame, Pixel center, Shape shape);

/// Window sampled through the similarity transform (rotation, scale) about `center`,
/// translated by `shift` inside the window; bilinear with border replication.
Signal2D extract_warped_window(const Signal2D& frame, Pixel center, Shape shape,
                               double rotation_rad, double scale, Pixel shift);

/// Preprocess, falling back to zeros for a constant window.
Signal2D preprocess_or_zero(const Signal2D& window);

TrackerState init_tracker(const Signal2D& frame, const BBox& bbox, const TrackerParams& params);

/// correlate -> locate -> recentre (clamped) -> adapt energies -> warm-started re-solve.
StepResult track_step(const TrackerState& state, const Signal2D& frame);

struct TrackFrame {
    int index = 0;
    Pixel predicted;
    std::optional<Point> truth;
    double error = 0.0;  // pixels; NaN without ground truth
    double psr = 0.0;
    double seconds = 0.0;
};

struct TrackRecord {
    std::vector<TrackFrame> frames;
    std::vector<ResponseMap> dumps;  // every `dump_every` frames when requested
    std::vector<int> dump_frames;
};

/// Runs init on frames[0] and track_step on the rest. `truth` may be empty or must
/// match the frame count.
TrackRecord run_tracker(std::span<const Signal2D> frames, const BBox& init, const TrackerParams& params,
                        std::span<const Point> truth = {}, int dump_every = 0);

struct PrecisionReport {
    std::vector<std::pair<double, double>> curve;  // (threshold, fraction with error <= threshold)
    double mean_error = 0.0;
    double fps = 0.0;
};

/// Throws InvalidArgument if any frame lacks ground truth.
PrecisionReport precision_curve(const TrackRecord& rec, std::span<const double> thresholds);

}  // namespace cflb
