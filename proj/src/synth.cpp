#include "cflb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "cflb/error.hpp"
#include "cflb/io.hpp"

namespace cflb::synth {
namespace fs = std::filesystem;
namespace {

// Per-image streams derived from the master seed so that image k never depends on
// how many images were generated before it.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(salt)};
    return std::mt19937_64(seq);
}

Signal2D white_noise(Shape shape, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Signal2D s(shape);
    for (auto& v : s.samples()) v = n(rng);
    return s;
}

double stddev(const Signal2D& s) {
    const auto v = s.samples();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(v.size()));
}

// Maps real-valued synthetic intensities into 8-bit grey levels.
Signal2D quantize(const Signal2D& s) {
    Signal2D out(s.shape());
    auto o = out.samples();
    const auto v = s.samples();
    for (std::size_t k = 0; k < v.size(); ++k) {
        o[k] = std::round(std::clamp(0.5 + 0.12 * v[k], 0.0, 1.0) * 255.0) / 255.0;
    }
    return out;
}

void plant(Signal2D& img, const Signal2D& tmpl, Pixel center, double amplitude) {
    const int top = center.row - tmpl.height() / 2;
    const int left = center.col - tmpl.width() / 2;
    for (int i = 0; i < tmpl.height(); ++i) {
        for (int j = 0; j < tmpl.width(); ++j) {
            const int r = top + i;
            const int c = left + j;
            if (r >= 0 && r < img.height() && c >= 0 && c < img.width()) img(r, c) += amplitude * tmpl(i, j);
        }
    }
}

double bilinear_zero(const Signal2D& s, double r, double c) {
    if (r < 0 || c < 0 || r > s.height() - 1 || c > s.width() - 1) return 0.0;
    const int r0 = static_cast<int>(std::floor(r));
    const int c0 = static_cast<int>(std::floor(c));
    const int r1 = std::min(r0 + 1, s.height() - 1);
    const int c1 = std::min(c0 + 1, s.width() - 1);
    const double fr = r - r0;
    const double fc = c - c0;
    return (1 - fr) * ((1 - fc) * s(r0, c0) + fc * s(r0, c1)) + fr * ((1 - fc) * s(r1, c0) + fc * s(r1, c1));
}

std::string numbered(const std::string& prefix, int k) {
    std::ostringstream os;
    os << prefix << std::setw(4) << std::setfill('0') << k << ".pgm";
    return os.str();
}

}  // namespace

Signal2D gaussian_blur(const Signal2D& s, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("gaussian_blur: sigma must be positive");
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        k[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
        total += k[t + radius];
    }
    for (auto& v : k) v /= total;
    const int h = s.height();
    const int w = s.width();
    Signal2D tmp(h, w);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) acc += k[t + radius] * s(i, std::clamp(j + t, 0, w - 1));
            tmp(i, j) = acc;
        }
    }
    Signal2D out(h, w);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) acc += k[t + radius] * tmp(std::clamp(i + t, 0, h - 1), j);
            out(i, j) = acc;
        }
    }
    return out;
}

Signal2D localization_template(const LocalizationSuiteParams& p) {
    if (p.template_size < 4) throw InvalidArgument("localization_template: template too small");
    auto rng = stream(p.seed, 0, 0x7e3a);
    const Signal2D texture = gaussian_blur(white_noise({p.template_size, p.template_size}, rng), 1.0);
    Signal2D t = multiply(power_normalize(texture), cosine_window(p.template_size, p.template_size));
    for (auto& v : t.samples()) v *= 2.0;
    return t;
}

std::vector<LocalizationSample> localization_set(const LocalizationSuiteParams& p, int count) {
    if (count < 0) throw InvalidArgument("localization_set: negative count");
    if (p.image_size < 2 * p.template_size) throw InvalidArgument("localization_set: image too small for the template");
    const Signal2D tmpl = localization_template(p);
    const int s = p.image_size;
    const int t = p.template_size;
    std::vector<LocalizationSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        auto rng = stream(p.seed, static_cast<std::uint64_t>(k) + 1, 0x10c);
        Signal2D bg = gaussian_blur(white_noise({s, s}, rng), 2.0);
        const double sd = stddev(bg);
        for (auto& v : bg.samples()) v *= p.clutter / sd;

        std::uniform_int_distribution<int> jit(-p.jitter, p.jitter);
        const Pixel target{p.target_nominal.row + jit(rng), p.target_nominal.col + jit(rng)};
        const Pixel reference{target.row + p.reference_offset.row, target.col + p.reference_offset.col};
        plant(bg, tmpl, target, 1.0);
        plant(bg, tmpl, reference, p.distractor_contrast);

        // Distractors keep clear of the target, the reference and each other; a
        // crowded image just gets fewer of them.
        std::uniform_int_distribution<int> pos(t, s - t - 1);
        std::vector<Pixel> taken{target, reference};
        for (int d = 0, attempts = 0; d < p.distractors && attempts < 100 * p.distractors; ++attempts) {
            const Pixel q{pos(rng), pos(rng)};
            const bool clear = std::all_of(taken.begin(), taken.end(), [&](Pixel o) {
                return std::hypot(q.row - o.row, q.col - o.col) > 1.5 * t;
            });
            if (!clear) continue;
            plant(bg, tmpl, q, p.distractor_contrast);
            taken.push_back(q);
            ++d;
        }
        std::normal_distribution<double> n(0.0, p.noise);
        if (p.noise > 0.0) {
            for (auto& v : bg.samples()) v += n(rng);
        }
        out.push_back({quantize(bg), target, reference});
    }
    return out;
}

TrackingSequence tracking_sequence(const TrackingSequenceParams& p) {
    if (p.frames <= 0 || p.target_size < 8) throw InvalidArgument("tracking_sequence: bad frame count or target size");
    const Shape frame{p.frame_height, p.frame_width};
    auto rng = stream(p.seed, 0, 0x7ac4);
    const int ts = p.target_size;

    Signal2D texture = gaussian_blur(white_noise({ts, ts}, rng), 1.2);
    texture = power_normalize(texture);
    Signal2D bg = gaussian_blur(white_noise(frame, rng), 2.5);
    const double sd = stddev(bg);
    for (auto& v : bg.samples()) v *= p.clutter / sd;

    TrackingSequence seq;
    const double half = (ts - 1) / 2.0;
    for (int f = 0; f < p.frames; ++f) {
        const Point c{p.start.row + f * p.velocity.row, p.start.col + f * p.velocity.col};
        if (c.row - half < 0 || c.col - half < 0 || c.row + half > frame.height - 1 || c.col + half > frame.width - 1) {
            throw InvalidArgument("tracking_sequence: target leaves the frame at frame " + std::to_string(f));
        }
        auto nrng = stream(p.seed, static_cast<std::uint64_t>(f) + 1, 0x5eed);
        std::normal_distribution<double> n(0.0, p.noise);
        Signal2D img = bg;
        for (int i = 0; i < frame.height; ++i) {
            for (int j = 0; j < frame.width; ++j) {
                // Sub-pixel placement: the texture is sampled at the fractional offset and
                // blended by the matching coverage so edges stay anti-aliased.
                const double u = i - (c.row - half);
                const double v = j - (c.col - half);
                if (u <= -1 || v <= -1 || u >= ts || v >= ts) continue;
                const double cover = std::clamp(std::min(u + 1, ts - u), 0.0, 1.0) *
                                     std::clamp(std::min(v + 1, ts - v), 0.0, 1.0);
                const double value = bilinear_zero(texture, std::clamp(u, 0.0, ts - 1.0), std::clamp(v, 0.0, ts - 1.0));
                img(i, j) += cover * (value - img(i, j));
            }
        }
        if (p.noise > 0.0) {
            for (auto& v : img.samples()) v += n(nrng);
        }
        seq.frames.push_back(quantize(img));
        seq.truth.push_back(c);
    }
    const Point c0 = seq.truth.front();
    seq.init = {static_cast<int>(std::lround(c0.row)) - ts / 2, static_cast<int>(std::lround(c0.col)) - ts / 2, ts, ts};
    return seq;
}

void write_localization_set(const fs::path& dir, const std::vector<LocalizationSample>& samples) {
    std::error_code ec;
    fs::create_directories(dir / "images", ec);
    if (ec) throw IoError("write_localization_set: cannot create " + (dir / "images").string());
    std::ofstream ann(dir / "annotations.csv");
    if (!ann) throw IoError("write_localization_set: cannot write annotations in " + dir.string());
    ann << "# index,file,target_row,target_col,reference_row,reference_col\n";
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const std::string name = numbered("img_", static_cast<int>(k));
        io::write_pgm(dir / "images" / name, samples[k].image);
        ann << k << ",images/" << name << ',' << samples[k].target.row << ',' << samples[k].target.col << ','
            << samples[k].reference.row << ',' << samples[k].reference.col << '\n';
    }
    if (!ann) throw IoError("write_localization_set: write failed");
}

std::vector<LocalizationSample> read_localization_set(const fs::path& dir) {
    std::ifstream ann(dir / "annotations.csv");
    if (!ann) throw IoError("read_localization_set: missing annotations.csv in " + dir.string());
    std::vector<LocalizationSample> out;
    std::string line;
    int lineno = 0;
    while (std::getline(ann, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::vector<std::string> f;
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 6) throw IoError("read_localization_set: line " + std::to_string(lineno) + " needs 6 fields");
        LocalizationSample s;
        try {
            s.target = {std::stoi(f[2]), std::stoi(f[3])};
            s.reference = {std::stoi(f[4]), std::stoi(f[5])};
        } catch (const std::exception&) {
            throw IoError("read_localization_set: unparsable coordinates on line " + std::to_string(lineno));
        }
        s.image = io::read_image(dir / f[1]);
        if (s.target.row < 0 || s.target.row >= s.image.height() || s.target.col < 0 || s.target.col >= s.image.width()) {
            throw IoError("read_localization_set: annotation outside image on line " + std::to_string(lineno));
        }
        out.push_back(std::move(s));
    }
    if (out.empty()) throw IoError("read_localization_set: no annotated images in " + dir.string());
    return out;
}

void write_tracking_sequence(const fs::path& dir, const TrackingSequence& seq) {
    std::error_code ec;
    fs::create_directories(dir / "frames", ec);
    if (ec) throw IoError("write_tracking_sequence: cannot create " + (dir / "frames").string());
    std::vector<io::TruthRow> rows;
    for (std::size_t k = 0; k < seq.frames.size(); ++k) {
        io::write_pgm(dir / "frames" / numbered("frame_", static_cast<int>(k)), seq.frames[k]);
        rows.push_back({static_cast<int>(k), seq.truth[k], Shape{seq.init.height, seq.init.width}});
    }
    io::write_ground_truth(dir / "groundtruth.csv", rows);
    std::ofstream b(dir / "init_bbox.txt");
    if (!b) throw IoError("write_tracking_sequence: cannot write init_bbox.txt");
    b << seq.init.row << ',' << seq.init.col << ',' << seq.init.height << ',' << seq.init.width << '\n';
}

BBox read_bbox(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_bbox: cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    std::stringstream ss(line);
    std::vector<int> v;
    std::string field;
    try {
        while (std::getline(ss, field, ',')) v.push_back(std::stoi(field));
    } catch (const std::exception&) {
        throw IoError("read_bbox: unparsable box in " + path.string());
    }
    if (v.size() != 4) throw IoError("read_bbox: expected row,col,height,width in " + path.string());
    return {v[0], v[1], v[2], v[3]};
}

}  // namespace cflb::synth
