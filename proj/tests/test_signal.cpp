#include <gtest/gtest.h>

#include <cmath>

#include "cflb/error.hpp"
#include "cflb/signal.hpp"
#include "support.hpp"

using namespace cflb;

TEST(Signal, RejectsBadShapesAndNonFinite) {
    EXPECT_THROW(Signal2D(0, 3), InvalidArgument);
    EXPECT_THROW(Signal2D(2, 2, {1.0, 2.0, 3.0}), InvalidArgument);
    EXPECT_THROW(Signal2D(1, 2, {1.0, NAN}), InvalidArgument);
    EXPECT_THROW(Signal2D(1, 2, {1.0, INFINITY}), InvalidArgument);
}

TEST(Signal, CircularShiftMovesSamplesAndWraps) {
    const Signal2D s(2, 3, {1, 2, 3, 4, 5, 6});
    const Signal2D t = circular_shift(s, {1, 1});
    // out(i, j) = s(i - 1, j - 1)
    EXPECT_EQ(t, Signal2D(2, 3, {6, 4, 5, 3, 1, 2}));
    EXPECT_EQ(circular_shift(s, {-5, 7}), circular_shift(s, {1, 1}));
    EXPECT_EQ(circular_shift(circular_shift(s, {1, 2}), {-1, -2}), s);
}

TEST(Signal, PowerNormalizeGivesZeroMeanUnitVariance) {
    std::mt19937_64 rng(1);
    const Signal2D s = tsup::random_signal({7, 5}, rng, 3.0);
    const Signal2D p = power_normalize(s);
    double mean = 0.0;
    double var = 0.0;
    for (double v : p.samples()) mean += v;
    mean /= static_cast<double>(p.size());
    for (double v : p.samples()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(p.size());
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(var, 1.0, 1e-12);
}

TEST(Signal, PowerNormalizeRejectsConstant) {
    EXPECT_THROW(power_normalize(Signal2D(3, 3, std::vector<double>(9, 0.25))), DegenerateInput);
}

TEST(Signal, CosineWindowZeroAtBordersAndSymmetric) {
    const Signal2D w = cosine_window(6, 9);
    for (int j = 0; j < 9; ++j) {
        EXPECT_DOUBLE_EQ(w(0, j), 0.0);
        EXPECT_DOUBLE_EQ(w(5, j), 0.0);
    }
    EXPECT_NEAR(w(4, 4), 0.5 - 0.5 * std::cos(2 * M_PI * 4 / 5), 1e-15);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 9; ++j) {
            EXPECT_NEAR(w(i, j), w(5 - i, 8 - j), 1e-15);
            EXPECT_GE(w(i, j), 0.0);
            EXPECT_LE(w(i, j), 1.0);
        }
    }
    EXPECT_THROW(cosine_window(1, 4), InvalidArgument);
}

TEST(Signal, CropIsAdjointOfPad) {
    std::mt19937_64 rng(2);
    const MaskSpec m{{9, 8}, {4, 3}, {2, 5}};
    const Signal2D a = tsup::random_signal(m.outer, rng);
    const Signal2D b = tsup::random_signal(m.inner, rng);
    EXPECT_NEAR(dot(crop(a, m), b), dot(a, pad(b, m)), 1e-12);
    EXPECT_EQ(crop(pad(b, m), m), b);
}

TEST(Signal, MaskValidation) {
    EXPECT_THROW((MaskSpec{{8, 8}, {4, 4}, {5, 0}}.validate()), InvalidArgument);
    EXPECT_THROW((MaskSpec{{8, 8}, {0, 4}, {0, 0}}.validate()), InvalidArgument);
    EXPECT_NO_THROW((MaskSpec{{8, 8}, {4, 4}, {4, 4}}.validate()));
    const MaskSpec c = MaskSpec::centered({16, 15}, {8, 8});
    EXPECT_EQ(c.offset, (Pixel{4, 3}));
    EXPECT_EQ(c.anchor(), (Pixel{8, 7}));
    EXPECT_TRUE(MaskSpec::identity({5, 5}).is_identity());
}

TEST(Signal, GaussianResponsePeaksAtCenter) {
    const Signal2D g = gaussian_response(9, 11, {3, 7}, 1.5);
    EXPECT_DOUBLE_EQ(g(3, 7), 1.0);
    EXPECT_DOUBLE_EQ(g(4, 7), std::exp(-1.0 / (2 * 1.5 * 1.5)));
    EXPECT_THROW(gaussian_response(9, 11, {9, 0}, 1.0), InvalidArgument);
    EXPECT_THROW(gaussian_response(9, 11, {0, 0}, 0.0), InvalidArgument);
}

TEST(Signal, AnchoredResponsePeakSitsAtCenterMinusAnchor) {
    const MaskSpec m = MaskSpec::centered({16, 16}, {8, 8});
    const Signal2D y = anchored_response(m, {3, 12}, 2.0);
    // anchor (8, 8): lag = (3 - 8, 12 - 8) mod 16 = (11, 4)
    EXPECT_DOUBLE_EQ(y(11, 4), 1.0);
}

TEST(Signal, PreprocessIsNormalizeThenWindow) {
    std::mt19937_64 rng(3);
    const Signal2D s = tsup::random_signal({6, 6}, rng);
    EXPECT_EQ(preprocess(s), multiply(power_normalize(s), cosine_window(6, 6)));
}
