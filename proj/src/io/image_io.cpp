#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "cflb/error.hpp"
#include "cflb/io.hpp"

namespace cflb::io {
namespace fs = std::filesystem;
namespace {

// Skips whitespace and '#' comments in a PNM header.
void skip_header_space(std::istream& in) {
    while (in) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
}

int read_header_int(std::istream& in, const fs::path& path) {
    skip_header_space(in);
    int v = 0;
    if (!(in >> v)) throw IoError("read_pgm: malformed header in " + path.string());
    return v;
}

}  // namespace

Signal2D read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_pgm: cannot open " + path.string());
    char magic[2] = {};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5') throw IoError("read_pgm: not a binary PGM (P5): " + path.string());
    const int w = read_header_int(in, path);
    const int h = read_header_int(in, path);
    const int maxval = read_header_int(in, path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
        throw IoError("read_pgm: unsupported dimensions or maxval in " + path.string());
    }
    in.get();  // single whitespace before the raster
    std::vector<unsigned char> raster(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.size())) {
        throw IoError("read_pgm: truncated raster in " + path.string());
    }
    std::vector<double> samples(raster.size());
    std::transform(raster.begin(), raster.end(), samples.begin(), [](unsigned char v) { return v / 255.0; });
    return Signal2D(h, w, std::move(samples));
}

void write_pgm(const fs::path& path, const Signal2D& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_pgm: cannot open " + path.string() + " for writing");
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    std::vector<unsigned char> raster(image.size());
    const auto s = image.samples();
    for (std::size_t k = 0; k < raster.size(); ++k) {
        raster[k] = static_cast<unsigned char>(std::lround(std::clamp(s[k], 0.0, 1.0) * 255.0));
    }
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) throw IoError("write_pgm: write failed for " + path.string());
}

Signal2D read_png(const fs::path& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&img, path.string().c_str()) == 0) {
        throw IoError("read_png: " + path.string() + ": " + img.message);
    }
    img.format = PNG_FORMAT_GRAY;
    std::vector<unsigned char> raster(PNG_IMAGE_SIZE(img));
    if (png_image_finish_read(&img, nullptr, raster.data(), 0, nullptr) == 0) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw IoError("read_png: " + path.string() + ": " + msg);
    }
    std::vector<double> samples(raster.size());
    std::transform(raster.begin(), raster.end(), samples.begin(), [](unsigned char v) { return v / 255.0; });
    return Signal2D(static_cast<int>(img.height), static_cast<int>(img.width), std::move(samples));
}

Signal2D read_image(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_image: cannot open " + path.string());
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    in.close();
    if (sig[0] == 'P' && sig[1] == '5') return read_pgm(path);
    if (png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
    throw IoError("read_image: unrecognised format: " + path.string());
}

std::vector<fs::path> list_frames(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("list_frames: not a directory: " + dir.string());
    struct Entry {
        long number;
        fs::path path;
    };
    std::vector<Entry> entries;
    for (const auto& de : fs::directory_iterator(dir)) {
        if (!de.is_regular_file()) continue;
        std::string ext = de.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext != ".pgm" && ext != ".png") continue;
        const std::string stem = de.path().stem().string();
        long number = -1;
        std::string digits;
        for (char c : stem) {
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits += c;
            } else if (!digits.empty()) {
                break;
            }
        }
        if (!digits.empty()) number = std::stol(digits);
        entries.push_back({number, de.path()});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.number != b.number) return a.number < b.number;
        return a.path < b.path;
    });
    std::vector<fs::path> out;
    out.reserve(entries.size());
    for (auto& e : entries) out.push_back(std::move(e.path));
    return out;
}

std::vector<TruthRow> read_ground_truth(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_ground_truth: cannot open " + path.string());
    std::vector<TruthRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 3 && fields.size() != 5) {
            throw IoError("read_ground_truth: line " + std::to_string(lineno) + " needs 3 or 5 fields");
        }
        try {
            TruthRow r;
            r.frame = std::stoi(fields[0]);
            r.center = {std::stod(fields[1]), std::stod(fields[2])};
            if (fields.size() == 5) r.size = Shape{std::stoi(fields[3]), std::stoi(fields[4])};
            rows.push_back(r);
        } catch (const std::exception&) {
            throw IoError("read_ground_truth: unparsable number on line " + std::to_string(lineno));
        }
    }
    return rows;
}

void write_ground_truth(const fs::path& path, const std::vector<TruthRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("write_ground_truth: cannot open " + path.string());
    out.precision(17);
    for (const auto& r : rows) {
        out << r.frame << ',' << r.center.row << ',' << r.center.col;
        if (r.size) out << ',' << r.size->height << ',' << r.size->width;
        out << '\n';
    }
    if (!out) throw IoError("write_ground_truth: write failed for " + path.string());
}

}  // namespace cflb::io
