#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "cflb/error.hpp"
#include "cflb/synth.hpp"
#include "cflb/track.hpp"
#include "support.hpp"

using namespace cflb;

TEST(Track, ExtractWindowReplicatesBorders) {
    Signal2D f(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) f(i, j) = i * 4 + j;
    }
    const Signal2D w = extract_window(f, {0, 0}, {4, 4});
    EXPECT_EQ(w(0, 0), f(0, 0));
    EXPECT_EQ(w(2, 2), f(0, 0));
    EXPECT_EQ(w(3, 3), f(1, 1));
    EXPECT_EQ(extract_window(f, {2, 2}, {4, 4}), f);
}

TEST(Track, IdentityWarpEqualsPlainWindow) {
    std::mt19937_64 rng(60);
    const Signal2D f = cflb::tsup::random_signal({30, 40}, rng);
    EXPECT_LT(cflb::tsup::rel_err(extract_warped_window(f, {15, 20}, {16, 12}, 0.0, 1.0, {0, 0}),
                                     extract_window(f, {15, 20}, {16, 12})),
              1e-12);
}

TEST(Track, StaticSceneWithZeroRateKeepsTheFilter) {
    const auto seq = synth::tracking_sequence({});
    TrackerParams p;
    p.eta = 0.0;
    TrackerState st = init_tracker(seq.frames[0], seq.init, p);
    EXPECT_TRUE(st.solver.converged);
    const Signal2D h0 = st.model.h;
    for (int k = 0; k < 5; ++k) {
        StepResult r = track_step(st, seq.frames[0]);
        EXPECT_EQ(r.state.bbox, seq.init);
        EXPECT_LT(cflb::tsup::rel_err(r.state.model.h, h0), 1e-8);
        st = std::move(r.state);
    }
}

TEST(Track, ZeroRateFrameUpdatesContinueTheInitialSolve) {
    // Without the exact start, eta = 0 frame updates extend the initial ADMM run.
    const auto seq = synth::tracking_sequence({});
    TrackerParams p;
    p.eta = 0.0;
    p.exact_init = false;
    TrackerState st = init_tracker(seq.frames[0], seq.init, p);
    ASSERT_FALSE(st.solver.converged);
    for (int k = 0; k < 5; ++k) st = track_step(st, seq.frames[0]).state;
    TrackerParams longer = p;
    longer.init_admm_iters = p.init_admm_iters + 5 * p.admm_iters;
    const TrackerState ref = init_tracker(seq.frames[0], seq.init, longer);
    EXPECT_LT(cflb::tsup::rel_err(st.model.h, ref.model.h), 1e-12);
}

TEST(Track, FollowsAKnownShift) {
    const auto seq = synth::tracking_sequence({});
    const TrackerState st = init_tracker(seq.frames[0], seq.init, TrackerParams{});
    const Signal2D moved = circular_shift(seq.frames[0], {2, -3});
    const StepResult r = track_step(st, moved);
    EXPECT_EQ(r.center, (Pixel{seq.init.center().row + 2, seq.init.center().col - 3}));
    EXPECT_GT(r.psr, 5.0);
}

TEST(Track, SyntheticSequenceIsTrackedWithinAPixel) {
    const auto seq = synth::tracking_sequence({});
    const TrackRecord rec = run_tracker(seq.frames, seq.init, TrackerParams{}, seq.truth);
    const std::vector<double> th{20.0};
    const PrecisionReport pr = precision_curve(rec, th);
    EXPECT_EQ(pr.curve.front().second, 1.0);
    EXPECT_LE(pr.mean_error, 1.0);
}

TEST(Track, FpsIsFramesOverWallTime) {
    const auto seq = synth::tracking_sequence({});
    const auto t0 = std::chrono::steady_clock::now();
    const TrackRecord rec = run_tracker(seq.frames, seq.init, TrackerParams{}, seq.truth);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::vector<double> th{1.0};
    const PrecisionReport pr = precision_curve(rec, th);
    double total = 0.0;
    for (const auto& f : rec.frames) total += f.seconds;
    EXPECT_DOUBLE_EQ(pr.fps, static_cast<double>(rec.frames.size()) / total);
    EXPECT_NEAR(pr.fps, static_cast<double>(rec.frames.size()) / wall, 0.01 * pr.fps);
}

TEST(Track, ResponseDumpsEveryKFrames) {
    auto params = synth::TrackingSequenceParams{};
    params.frames = 10;
    const auto seq = synth::tracking_sequence(params);
    const TrackRecord rec = run_tracker(seq.frames, seq.init, TrackerParams{}, seq.truth, 3);
    EXPECT_EQ(rec.dump_frames, (std::vector<int>{3, 6, 9}));
    EXPECT_EQ(rec.dumps.size(), 3u);
}

TEST(Track, InputErrors) {
    const auto seq = synth::tracking_sequence({});
    EXPECT_THROW(init_tracker(seq.frames[0], {150, 190, 24, 24}, TrackerParams{}), InvalidArgument);
    EXPECT_THROW(init_tracker(seq.frames[0], {10, 10, 4, 4}, TrackerParams{}), InvalidArgument);
    TrackerParams bad;
    bad.eta = 2.0;
    EXPECT_THROW(init_tracker(seq.frames[0], seq.init, bad), InvalidArgument);
    const std::vector<Point> short_truth(seq.truth.begin(), seq.truth.begin() + 5);
    EXPECT_THROW(run_tracker(seq.frames, seq.init, TrackerParams{}, short_truth), InvalidArgument);
    const TrackRecord no_truth = run_tracker(std::span(seq.frames).first(3), seq.init, TrackerParams{});
    const std::vector<double> th{20.0};
    EXPECT_TRUE(std::isnan(no_truth.frames[1].error));
    EXPECT_THROW(precision_curve(no_truth, th), InvalidArgument);
}
