#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cflb/signal.hpp"
#include "cflb/track.hpp"

namespace cflb::synth {

/// Cluttered localisation images: one target copy at full contrast, a reference
/// copy (the normaliser for localisation distance, like a second eye) and random
/// distractor copies at reduced contrast. Images are quantised to 8 bits in [0, 1]
/// so writing them as PGM is lossless.
struct LocalizationSuiteParams {
    int image_size = 128;
    int template_size = 14;
    double clutter = 0.6;              // background std relative to the template
    double distractor_contrast = 0.5;  // amplitude of the reference and distractor copies
    int distractors = 3;
    double noise = 0.1;
    Pixel target_nominal{44, 40};
    int jitter = 4;
    Pixel reference_offset{0, 48};
    std::uint64_t seed = 0;
};

struct LocalizationSample {
    Signal2D image;
    Pixel target;
    Pixel reference;
};

/// The template depends only on params.seed; images on (seed, index).
Signal2D localization_template(const LocalizationSuiteParams& params);
std::vector<LocalizationSample> localization_set(const LocalizationSuiteParams& params, int count);

/// A textured square moving at constant velocity over static clutter.
struct TrackingSequenceParams {
    int frame_height = 160;
    int frame_width = 200;
    int target_size = 24;
    int frames = 60;
    Point start{60.3, 40.6};
    Point velocity{1.2, 1.6};  // pixels per frame (speed 2)
    double clutter = 0.5;      // background std relative to the target texture
    double noise = 0.05;
    std::uint64_t seed = 0;
};

struct TrackingSequence {
    std::vector<Signal2D> frames;
    std::vector<Point> truth;  // target centre per frame
    BBox init;                 // first-frame box
};

TrackingSequence tracking_sequence(const TrackingSequenceParams& params);

/// Separable Gaussian blur with border replication.
Signal2D gaussian_blur(const Signal2D& s, double sigma);

// On-disk layouts (see README):
//   localisation: images/img_0000.pgm ... + annotations.csv
//     (index,file,target_row,target_col,reference_row,reference_col)
//   tracking: frames/frame_0000.pgm ... + groundtruth.csv + init_bbox.txt (row,col,height,width)
void write_localization_set(const std::filesystem::path& dir, const std::vector<LocalizationSample>& samples);
std::vector<LocalizationSample> read_localization_set(const std::filesystem::path& dir);
void write_tracking_sequence(const std::filesystem::path& dir, const TrackingSequence& seq);
BBox read_bbox(const std::filesystem::path& path);

}  // namespace cflb::synth
