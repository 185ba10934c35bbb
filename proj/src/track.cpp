#include "cflb/track.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "cflb/error.hpp"

namespace cflb {
namespace {

int clamp_index(long v, int n) { return static_cast<int>(std::clamp<long>(v, 0, n - 1)); }

double bilinear(const Signal2D& f, double r, double c) {
    const double rr = std::clamp(r, 0.0, static_cast<double>(f.height() - 1));
    const double cc = std::clamp(c, 0.0, static_cast<double>(f.width() - 1));
    const int r0 = static_cast<int>(std::floor(rr));
    const int c0 = static_cast<int>(std::floor(cc));
    const int r1 = std::min(r0 + 1, f.height() - 1);
    const int c1 = std::min(c0 + 1, f.width() - 1);
    const double fr = rr - r0;
    const double fc = cc - c0;
    return (1 - fr) * ((1 - fc) * f(r0, c0) + fc * f(r0, c1)) + fr * ((1 - fc) * f(r1, c0) + fc * f(r1, c1));
}

int wrap_signed(int v, int n) {
    v %= n;
    if (v < 0) v += n;
    return v > n / 2 ? v - n : v;
}

BBox clamp_to_frame(BBox b, Shape frame) {
    b.row = std::clamp(b.row, 0, frame.height - b.height);
    b.col = std::clamp(b.col, 0, frame.width - b.width);
    return b;
}

BBox recentered(const BBox& b, Pixel center, Shape frame) {
    return clamp_to_frame({center.row - b.height / 2, center.col - b.width / 2, b.height, b.width}, frame);
}

Pixel window_center(Shape s) { return {s.height / 2, s.width / 2}; }

}  // namespace

void TrackerParams::validate() const {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("TrackerParams: eta outside [0, 1]");
    if (!(lambda > 0.0)) throw InvalidArgument("TrackerParams: lambda must be positive");
    if (admm_iters <= 0 || init_admm_iters <= 0) throw InvalidArgument("TrackerParams: ADMM budgets must be positive");
    if (!(sigma_divisor > 0.0)) throw InvalidArgument("TrackerParams: sigma_divisor must be positive");
    if (!(search_scale >= 1.0)) throw InvalidArgument("TrackerParams: search_scale must be >= 1");
    if (init_perturbations < 0) throw InvalidArgument("TrackerParams: init_perturbations must be >= 0");
    if (max_rotation_deg < 0 || max_scale_delta < 0 || max_scale_delta >= 1 || max_translation < 0) {
        throw InvalidArgument("TrackerParams: perturbation ranges out of bounds");
    }
    AdmmParams a = admm;
    a.max_iters = admm_iters;
    a.validate();
}

Signal2D extract_window(const Signal2D& frame, Pixel center, Shape shape) {
    Signal2D w(shape);
    const int top = center.row - shape.height / 2;
    const int left = center.col - shape.width / 2;
    for (int i = 0; i < shape.height; ++i) {
        const int r = clamp_index(top + i, frame.height());
        for (int j = 0; j < shape.width; ++j) w(i, j) = frame(r, clamp_index(left + j, frame.width()));
    }
    return w;
}

Signal2D extract_warped_window(const Signal2D& frame, Pixel center, Shape shape, double rotation_rad,
                               double scale, Pixel shift) {
    if (!(scale > 0.0)) throw InvalidArgument("extract_warped_window: scale must be positive");
    Signal2D w(shape);
    const Pixel wc = window_center(shape);
    const double cs = std::cos(rotation_rad) / scale;
    const double sn = std::sin(rotation_rad) / scale;
    for (int i = 0; i < shape.height; ++i) {
        for (int j = 0; j < shape.width; ++j) {
            // Inverse map: window offset from the shifted target back into the frame.
            const double dr = i - wc.row - shift.row;
            const double dc = j - wc.col - shift.col;
            const double fr = center.row + cs * dr + sn * dc;
            const double fc = center.col - sn * dr + cs * dc;
            w(i, j) = bilinear(frame, fr, fc);
        }
    }
    return w;
}

Signal2D preprocess_or_zero(const Signal2D& window) {
    try {
        return preprocess(window);
    } catch (const DegenerateInput&) {
        return Signal2D(window.shape());
    }
}

TrackerState init_tracker(const Signal2D& frame, const BBox& bbox, const TrackerParams& params) {
    params.validate();
    if (bbox.height < 8 || bbox.width < 8) throw InvalidArgument("init_tracker: target must be at least 8x8");
    if (bbox.row < 0 || bbox.col < 0 || bbox.row + bbox.height > frame.height() ||
        bbox.col + bbox.width > frame.width()) {
        throw InvalidArgument("init_tracker: bounding box outside the frame");
    }
    const Shape target{bbox.height, bbox.width};
    const Shape window{std::max(bbox.height, static_cast<int>(std::lround(params.search_scale * bbox.height))),
                       std::max(bbox.width, static_cast<int>(std::lround(params.search_scale * bbox.width)))};
    const MaskSpec mask = MaskSpec::centered(window, target);
    const Pixel wc = window_center(window);
    const Pixel center = bbox.center();
    const double sigma = std::sqrt(static_cast<double>(bbox.height) * bbox.width) / params.sigma_divisor;

    std::vector<Signal2D> xs;
    std::vector<Signal2D> ys;
    xs.push_back(preprocess_or_zero(extract_window(frame, center, window)));
    ys.push_back(anchored_response(mask, wc, sigma));

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> rot(-params.max_rotation_deg, params.max_rotation_deg);
    std::uniform_real_distribution<double> scl(1.0 - params.max_scale_delta, 1.0 + params.max_scale_delta);
    std::uniform_int_distribution<int> shift(-params.max_translation, params.max_translation);
    for (int k = 0; k < params.init_perturbations; ++k) {
        const double angle = rot(rng) * std::numbers::pi / 180.0;
        const double s = scl(rng);
        const Pixel t{shift(rng), shift(rng)};
        xs.push_back(preprocess_or_zero(extract_warped_window(frame, center, window, angle, s, t)));
        ys.push_back(anchored_response(mask, {wc.row + t.row, wc.col + t.col}, sigma));
    }

    // Averaged energies share the scale of the per-frame running average.
    const SpectralEnergies energies =
        spectral_energies(xs, ys).scaled(1.0 / static_cast<double>(xs.size()));

    AdmmParams admm = params.admm;
    admm.max_iters = params.init_admm_iters;
    admm.rel_tol = params.init_rel_tol;
    admm.change_tol = params.init_rel_tol;
    AdmmResult solved;
    if (params.exact_init && mask.inner.count() <= kOracleMaxElements) {
        // ADMM converges slowly on these windows; start it at the exact minimiser.
        const AdmmState start = admm_stationary_state(
            energies, mask, masked_oracle_from_energies(energies, mask, params.lambda), admm.mu_max);
        solved = cflb_admm_solve(energies, mask, params.lambda, admm, &start);
    } else {
        solved = cflb_admm_solve(energies, mask, params.lambda, admm);
    }

    TrackerState st;
    st.params = params;
    st.model = std::move(solved.model);
    st.solver = std::move(solved.state);
    st.bbox = bbox;
    st.frame_shape = frame.shape();
    st.frame_index = 0;
    st.sigma = sigma;
    st.target_response = ys.front();
    try {
        st.last_psr = psr(correlate(st.model, xs.front()), params.psr_radius);
    } catch (const DegenerateInput&) {
        st.last_psr = 0.0;
    }
    return st;
}

StepResult track_step(const TrackerState& state, const Signal2D& frame) {
    if (frame.shape() != state.frame_shape) throw InvalidArgument("track_step: frame size changed");
    const TrackerParams& p = state.params;
    const MaskSpec& mask = state.model.mask;
    const Pixel wc = window_center(mask.outer);

    const Pixel prev = state.bbox.center();
    const Signal2D search = preprocess_or_zero(extract_window(frame, prev, mask.outer));
    const ResponseMap r = correlate(state.model, search);
    const Pixel hit = locate(r, mask);
    const Pixel moved{prev.row + wrap_signed(hit.row - wc.row, mask.outer.height),
                      prev.col + wrap_signed(hit.col - wc.col, mask.outer.width)};

    double score = 0.0;
    try {
        score = psr(r, p.psr_radius);
    } catch (const DegenerateInput&) {
        score = 0.0;
    }

    StepResult out;
    out.state = state;
    TrackerState& st = out.state;
    st.bbox = recentered(state.bbox, moved, frame.shape());
    st.frame_index = state.frame_index + 1;
    st.last_psr = score;

    const Signal2D x = preprocess_or_zero(extract_window(frame, st.bbox.center(), mask.outer));
    const SpectralEnergies energies = online_update(state.model.energies, x, state.target_response, p.eta);

    AdmmParams admm = p.admm;
    admm.max_iters = p.admm_iters;
    admm.rel_tol = 0.0;  // fixed per-frame budget
    AdmmResult solved = cflb_admm_solve(energies, mask, p.lambda, admm, &state.solver);
    st.model = std::move(solved.model);
    st.solver = std::move(solved.state);

    out.center = st.bbox.center();
    out.psr = score;
    return out;
}

TrackRecord run_tracker(std::span<const Signal2D> frames, const BBox& init, const TrackerParams& params,
                        std::span<const Point> truth, int dump_every) {
    using clock = std::chrono::steady_clock;
    if (frames.empty()) throw InvalidArgument("run_tracker: no frames");
    if (!truth.empty() && truth.size() != frames.size()) {
        throw InvalidArgument("run_tracker: ground truth length does not match the frame count");
    }
    TrackRecord rec;
    auto record = [&](int index, Pixel predicted, double score, double seconds) {
        TrackFrame f;
        f.index = index;
        f.predicted = predicted;
        f.psr = score;
        f.seconds = seconds;
        f.error = std::numeric_limits<double>::quiet_NaN();
        if (!truth.empty()) {
            f.truth = truth[static_cast<std::size_t>(index)];
            f.error = std::hypot(predicted.row - f.truth->row, predicted.col - f.truth->col);
        }
        rec.frames.push_back(f);
    };

    auto t0 = clock::now();
    TrackerState state = init_tracker(frames[0], init, params);
    record(0, state.bbox.center(), state.last_psr, std::chrono::duration<double>(clock::now() - t0).count());

    for (std::size_t k = 1; k < frames.size(); ++k) {
        t0 = clock::now();
        if (dump_every > 0 && k % static_cast<std::size_t>(dump_every) == 0) {
            const Signal2D search =
                preprocess_or_zero(extract_window(frames[k], state.bbox.center(), state.model.mask.outer));
            rec.dumps.push_back(correlate(state.model, search));
            rec.dump_frames.push_back(static_cast<int>(k));
        }
        StepResult step = track_step(state, frames[k]);
        state = std::move(step.state);
        record(static_cast<int>(k), step.center, step.psr, std::chrono::duration<double>(clock::now() - t0).count());
    }
    return rec;
}

PrecisionReport precision_curve(const TrackRecord& rec, std::span<const double> thresholds) {
    if (rec.frames.empty()) throw InvalidArgument("precision_curve: empty record");
    double total_error = 0.0;
    double total_time = 0.0;
    for (const auto& f : rec.frames) {
        if (!f.truth) throw InvalidArgument("precision_curve: frame " + std::to_string(f.index) + " lacks ground truth");
        total_error += f.error;
        total_time += f.seconds;
    }
    const double n = static_cast<double>(rec.frames.size());
    PrecisionReport out;
    for (double t : thresholds) {
        const auto hits = std::count_if(rec.frames.begin(), rec.frames.end(),
                                        [t](const TrackFrame& f) { return f.error <= t; });
        out.curve.emplace_back(t, static_cast<double>(hits) / n);
    }
    out.mean_error = total_error / n;
    out.fps = total_time > 0.0 ? n / total_time : 0.0;
    return out;
}

}  // namespace cflb
