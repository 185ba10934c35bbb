#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cflb/signal.hpp"
#include "cflb/solvers.hpp"
#include "cflb/track.hpp"

namespace cflb::io {

/// Reads an 8-bit grayscale PGM (P5) or PNG; samples are value / 255.
Signal2D read_image(const std::filesystem::path& path);
Signal2D read_pgm(const std::filesystem::path& path);
Signal2D read_png(const std::filesystem::path& path);

/// Writes an 8-bit P5 PGM; samples are clamped to [0, 1] and rounded from x * 255.
void write_pgm(const std::filesystem::path& path, const Signal2D& image);

/// Image files in `dir` (.pgm/.png), sorted by the integer embedded in the file
/// stem, ties broken lexicographically.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Binary FilterModel container, version 1. Layout in docs/model_format.md.
void save_model(const std::filesystem::path& path, const FilterModel& model);
FilterModel load_model(const std::filesystem::path& path);
std::vector<unsigned char> encode_model(const FilterModel& model);
FilterModel decode_model(const std::vector<unsigned char>& bytes);

/// One ground-truth line: frame_index,center_row,center_col[,height,width]
struct TruthRow {
    int frame = 0;
    Point center;
    std::optional<Shape> size;
};

/// Parses the table; blank lines and lines starting with '#' are skipped.
std::vector<TruthRow> read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path, const std::vector<TruthRow>& rows);

}  // namespace cflb::io
