#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "cflb/error.hpp"
#include "cflb/synth.hpp"

using namespace cflb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Synth, LocalizationSetIsDeterministic) {
    synth::LocalizationSuiteParams p;
    p.seed = 9;
    const auto a = synth::localization_set(p, 4);
    const auto b = synth::localization_set(p, 6);
    for (int k = 0; k < 4; ++k) {
        EXPECT_EQ(a[k].image, b[k].image);
        EXPECT_EQ(a[k].target, b[k].target);
    }
    p.seed = 10;
    EXPECT_NE(synth::localization_set(p, 1)[0].image, a[0].image);
}

TEST(Synth, WrittenDatasetIsByteIdentical) {
    synth::LocalizationSuiteParams p;
    p.seed = 4;
    const fs::path base = fs::temp_directory_path() / "cflb_synth_bytes";
    fs::remove_all(base);
    synth::write_localization_set(base / "a", synth::localization_set(p, 3));
    synth::write_localization_set(base / "b", synth::localization_set(p, 3));
    EXPECT_EQ(slurp(base / "a" / "annotations.csv"), slurp(base / "b" / "annotations.csv"));
    for (const auto& f : fs::directory_iterator(base / "a" / "images")) {
        EXPECT_EQ(slurp(f.path()), slurp(base / "b" / "images" / f.path().filename()));
    }
    const auto back = synth::read_localization_set(base / "a");
    const auto orig = synth::localization_set(p, 3);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[2].image, orig[2].image);
    EXPECT_EQ(back[2].reference, orig[2].reference);
}

TEST(Synth, AnnotationsMarkThePlantedTemplate) {
    synth::LocalizationSuiteParams p;
    p.clutter = 0.0;
    p.noise = 0.0;
    p.distractor_contrast = 0.0;
    p.seed = 2;
    const Signal2D t = synth::localization_template(p);
    const double flat = 128.0 / 255.0;
    for (const auto& s : synth::localization_set(p, 5)) {
        const int top = s.target.row - t.height() / 2;
        const int left = s.target.col - t.width() / 2;
        for (int i = 0; i < s.image.height(); ++i) {
            for (int j = 0; j < s.image.width(); ++j) {
                const bool inside = i >= top && i < top + t.height() && j >= left && j < left + t.width();
                if (!inside) {
                    ASSERT_EQ(s.image(i, j), flat);
                }
            }
        }
        EXPECT_NE(s.image(s.target.row, s.target.col - 1), flat);
        EXPECT_EQ(s.reference.col - s.target.col, p.reference_offset.col);
    }
}

TEST(Synth, TrackingTruthFollowsTheConfiguredPath) {
    synth::TrackingSequenceParams p;
    const auto seq = synth::tracking_sequence(p);
    ASSERT_EQ(seq.frames.size(), 60u);
    for (int f = 0; f < 60; ++f) {
        EXPECT_DOUBLE_EQ(seq.truth[f].row, p.start.row + f * p.velocity.row);
        EXPECT_DOUBLE_EQ(seq.truth[f].col, p.start.col + f * p.velocity.col);
    }
    EXPECT_NEAR(std::hypot(p.velocity.row, p.velocity.col), 2.0, 1e-12);
    EXPECT_LE(std::abs(seq.init.center().row - seq.truth[0].row), 1.0);
    EXPECT_LE(std::abs(seq.init.center().col - seq.truth[0].col), 1.0);
}

TEST(Synth, TargetLeavingTheFrameIsRejected) {
    synth::TrackingSequenceParams p;
    p.velocity = {0.0, 5.0};
    EXPECT_THROW(synth::tracking_sequence(p), InvalidArgument);
}

TEST(Synth, UnwritableDestination) {
    const fs::path file = fs::temp_directory_path() / "cflb_synth_file";
    std::ofstream(file) << "x";
    EXPECT_THROW(synth::write_localization_set(file / "sub", {}), IoError);
}
