#include <gtest/gtest.h>

#include <png.h>

#include <filesystem>
#include <fstream>

#include "cflb/error.hpp"
#include "cflb/io.hpp"
#include "support.hpp"

using namespace cflb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cflb_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
    std::ofstream(p, std::ios::binary) << bytes;
}

Signal2D quantized(Shape s, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> v(0, 255);
    Signal2D out(s);
    for (auto& x : out.samples()) x = v(rng) / 255.0;
    return out;
}

}  // namespace

TEST(Io, PgmRoundTripIsExactFor8BitValues) {
    std::mt19937_64 rng(70);
    const fs::path dir = scratch("pgm");
    const Signal2D img = quantized({13, 7}, rng);
    io::write_pgm(dir / "a.pgm", img);
    EXPECT_EQ(io::read_image(dir / "a.pgm"), img);
}

TEST(Io, PgmWriterClampsOutOfRange) {
    const fs::path dir = scratch("clamp");
    io::write_pgm(dir / "c.pgm", Signal2D(1, 3, {-1.0, 0.5, 2.0}));
    const Signal2D back = io::read_pgm(dir / "c.pgm");
    EXPECT_EQ(back(0, 0), 0.0);
    EXPECT_EQ(back(0, 1), 128.0 / 255.0);
    EXPECT_EQ(back(0, 2), 1.0);
}

TEST(Io, PgmHeaderWithComment) {
    const fs::path dir = scratch("comment");
    write_bytes(dir / "h.pgm", std::string("P5\n# made by hand\n2 1\n255\n") + char(0) + char(255));
    EXPECT_EQ(io::read_pgm(dir / "h.pgm"), Signal2D(1, 2, {0.0, 1.0}));
}

TEST(Io, MalformedImagesAreIoErrors) {
    const fs::path dir = scratch("bad");
    write_bytes(dir / "short.pgm", "P5\n4 4\n255\nabc");
    write_bytes(dir / "magic.pgm", "P2\n1 1\n255\n0");
    write_bytes(dir / "deep.pgm", "P5\n1 1\n65535\n00");
    EXPECT_THROW(io::read_image(dir / "short.pgm"), IoError);
    EXPECT_THROW(io::read_image(dir / "magic.pgm"), IoError);
    EXPECT_THROW(io::read_image(dir / "deep.pgm"), IoError);
    EXPECT_THROW(io::read_image(dir / "missing.pgm"), IoError);
}

TEST(Io, ReadsGrayscalePng) {
    const fs::path dir = scratch("png");
    std::vector<unsigned char> px{0, 51, 102, 153, 204, 255};
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = 3;
    image.height = 2;
    image.format = PNG_FORMAT_GRAY;
    ASSERT_TRUE(png_image_write_to_file(&image, (dir / "g.png").c_str(), 0, px.data(), 0, nullptr));
    const Signal2D s = io::read_image(dir / "g.png");
    ASSERT_EQ(s.shape(), (Shape{2, 3}));
    for (std::size_t k = 0; k < px.size(); ++k) EXPECT_EQ(s.samples()[k], px[k] / 255.0);
}

TEST(Io, ListFramesSortsNumerically) {
    const fs::path dir = scratch("frames");
    for (const char* n : {"frame_10.pgm", "frame_2.pgm", "frame_1.png", "notes.txt"}) write_bytes(dir / n, "x");
    const auto frames = io::list_frames(dir);
    ASSERT_EQ(frames.size(), 3u);
    EXPECT_EQ(frames[0].filename(), "frame_1.png");
    EXPECT_EQ(frames[1].filename(), "frame_2.pgm");
    EXPECT_EQ(frames[2].filename(), "frame_10.pgm");
    EXPECT_THROW(io::list_frames(dir / "nope"), IoError);
}

TEST(Io, GroundTruthParsing) {
    const fs::path dir = scratch("gt");
    write_bytes(dir / "gt.csv", "# frame,row,col\n0,10.5,20\n\n1,11,21.25,24,30\n");
    const auto rows = io::read_ground_truth(dir / "gt.csv");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].frame, 0);
    EXPECT_EQ(rows[0].center.row, 10.5);
    EXPECT_FALSE(rows[0].size);
    EXPECT_EQ(rows[1].center.col, 21.25);
    EXPECT_EQ(*rows[1].size, (Shape{24, 30}));

    io::write_ground_truth(dir / "out.csv", rows);
    const auto again = io::read_ground_truth(dir / "out.csv");
    EXPECT_EQ(again[1].center.col, 21.25);

    write_bytes(dir / "bad.csv", "0,1\n");
    EXPECT_THROW(io::read_ground_truth(dir / "bad.csv"), IoError);
    write_bytes(dir / "nan.csv", "0,abc,2\n");
    EXPECT_THROW(io::read_ground_truth(dir / "nan.csv"), IoError);
}

TEST(Io, ModelRoundTrip) {
    std::mt19937_64 rng(71);
    const MaskSpec m = MaskSpec::centered({12, 10}, {5, 4});
    std::vector<Signal2D> xs{cflb::tsup::random_signal(m.outer, rng)};
    std::vector<Signal2D> ys{anchored_response(m, {6, 5}, 1.0)};
    const FilterModel f =
        FilterModel::from_filter(cflb::tsup::random_signal(m.inner, rng), m, spectral_energies(xs, ys), 0.125);
    const FilterModel g = io::decode_model(io::encode_model(f));
    EXPECT_EQ(g.h, f.h);
    EXPECT_EQ(g.mask, f.mask);
    EXPECT_EQ(g.lambda, f.lambda);
    EXPECT_EQ(g.energies.s_xx, f.energies.s_xx);
    EXPECT_EQ(g.energies.s_xy, f.energies.s_xy);
    EXPECT_EQ(g.energies.s_yy, f.energies.s_yy);
    EXPECT_EQ(g.energies.count, f.energies.count);
    EXPECT_EQ(g.h_hat_padded, f.h_hat_padded);

    const fs::path dir = scratch("model");
    io::save_model(dir / "f.cflb", f);
    EXPECT_EQ(io::load_model(dir / "f.cflb").h, f.h);
}

TEST(Io, CorruptModelsAreRejected) {
    std::mt19937_64 rng(72);
    const MaskSpec m = MaskSpec::identity({4, 4});
    std::vector<Signal2D> xs{cflb::tsup::random_signal(m.outer, rng)}, ys{Signal2D(4, 4)};
    auto bytes = io::encode_model(FilterModel::from_filter(Signal2D(4, 4), m, spectral_energies(xs, ys), 1.0));
    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_THROW(io::decode_model(truncated), IoError);
    auto magic = bytes;
    magic[0] = 'X';
    EXPECT_THROW(io::decode_model(magic), IoError);
    auto version = bytes;
    version[8] = 9;
    EXPECT_THROW(io::decode_model(version), IoError);
}
