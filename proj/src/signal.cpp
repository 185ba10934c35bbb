#include "cflb/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "cflb/error.hpp"

namespace cflb {
namespace {

long wrap(long v, long n) {
    const long r = v % n;
    return r < 0 ? r + n : r;
}

void require_same_shape(const Signal2D& a, const Signal2D& b, const char* what) {
    if (a.shape() != b.shape()) {
        throw InvalidArgument(std::string(what) + ": shape mismatch");
    }
}

}  // namespace

Signal2D::Signal2D(int height, int width) : shape_{height, width} {
    if (height <= 0 || width <= 0) {
        throw InvalidArgument("Signal2D: dimensions must be positive");
    }
    samples_.assign(shape_.count(), 0.0);
}

Signal2D::Signal2D(int height, int width, std::vector<double> samples)
    : shape_{height, width}, samples_(std::move(samples)) {
    if (height <= 0 || width <= 0) {
        throw InvalidArgument("Signal2D: dimensions must be positive");
    }
    if (samples_.size() != shape_.count()) {
        throw InvalidArgument("Signal2D: sample count " + std::to_string(samples_.size()) +
                              " does not match " + std::to_string(height) + "x" +
                              std::to_string(width));
    }
    check_finite();
}

void Signal2D::check_finite() const {
    for (double v : samples_) {
        if (!std::isfinite(v)) throw InvalidArgument("Signal2D: non-finite sample");
    }
}

MaskSpec MaskSpec::centered(Shape outer, Shape inner) {
    MaskSpec m{outer, inner, {(outer.height - inner.height) / 2, (outer.width - inner.width) / 2}};
    m.validate();
    return m;
}

MaskSpec MaskSpec::identity(Shape shape) {
    MaskSpec m{shape, shape, {0, 0}};
    m.validate();
    return m;
}

void MaskSpec::validate() const {
    if (outer.height <= 0 || outer.width <= 0 || inner.height <= 0 || inner.width <= 0) {
        throw InvalidArgument("MaskSpec: shapes must be positive");
    }
    if (offset.row < 0 || offset.col < 0 || offset.row + inner.height > outer.height ||
        offset.col + inner.width > outer.width) {
        throw InvalidArgument("MaskSpec: inner rectangle does not fit inside outer");
    }
}

Signal2D circular_shift(const Signal2D& s, ShiftVec d) {
    const int h = s.height();
    const int w = s.width();
    Signal2D out(h, w);
    const long dy = wrap(d.dy, h);
    const long dx = wrap(d.dx, w);
    for (int i = 0; i < h; ++i) {
        const int si = static_cast<int>(wrap(i - dy, h));
        for (int j = 0; j < w; ++j) {
            out(i, j) = s(si, static_cast<int>(wrap(j - dx, w)));
        }
    }
    return out;
}

Signal2D power_normalize(const Signal2D& s) {
    const auto v = s.samples();
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= n;
    const double sd = std::sqrt(var);
    // Relative threshold: rounding noise on a constant image must still count as constant.
    const double scale = std::max(1.0, std::abs(mean));
    if (!(sd > 1e-12 * scale)) {
        throw DegenerateInput("power_normalize: input has zero variance");
    }
    Signal2D out(s.height(), s.width());
    auto o = out.samples();
    for (std::size_t k = 0; k < v.size(); ++k) o[k] = (v[k] - mean) / sd;
    return out;
}

Signal2D cosine_window(int height, int width) {
    if (height < 2 || width < 2) {
        throw InvalidArgument("cosine_window: dimensions must be at least 2");
    }
    auto hann = [](int n) {
        std::vector<double> p(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            p[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / (n - 1));
        }
        // Exact endpoint zero.
        p.front() = 0.0;
        p.back() = 0.0;
        return p;
    };
    const auto rows = hann(height);
    const auto cols = hann(width);
    Signal2D out(height, width);
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) out(i, j) = rows[i] * cols[j];
    }
    return out;
}

Signal2D crop(const Signal2D& s, const MaskSpec& m) {
    m.validate();
    if (s.shape() != m.outer) throw InvalidArgument("crop: signal does not have the outer shape");
    Signal2D out(m.inner);
    for (int i = 0; i < m.inner.height; ++i) {
        for (int j = 0; j < m.inner.width; ++j) out(i, j) = s(i + m.offset.row, j + m.offset.col);
    }
    return out;
}

Signal2D pad(const Signal2D& s, const MaskSpec& m) {
    m.validate();
    if (s.shape() != m.inner) throw InvalidArgument("pad: signal does not have the inner shape");
    Signal2D out(m.outer);
    for (int i = 0; i < m.inner.height; ++i) {
        for (int j = 0; j < m.inner.width; ++j) out(i + m.offset.row, j + m.offset.col) = s(i, j);
    }
    return out;
}

Signal2D gaussian_response(int height, int width, Pixel center, double sigma) {
    if (height <= 0 || width <= 0) throw InvalidArgument("gaussian_response: bad dimensions");
    if (center.row < 0 || center.row >= height || center.col < 0 || center.col >= width) {
        throw InvalidArgument("gaussian_response: center outside the grid");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("gaussian_response: sigma must be positive");
    }
    Signal2D out(height, width);
    const double denom = 2.0 * sigma * sigma;
    for (int i = 0; i < height; ++i) {
        const double di = i - center.row;
        for (int j = 0; j < width; ++j) {
            const double dj = j - center.col;
            out(i, j) = std::exp(-(di * di + dj * dj) / denom);
        }
    }
    return out;
}

Signal2D anchored_response(const MaskSpec& mask, Pixel center, double sigma) {
    mask.validate();
    const Pixel a = mask.anchor();
    return circular_shift(gaussian_response(mask.outer.height, mask.outer.width, center, sigma),
                          {-a.row, -a.col});
}

Signal2D preprocess(const Signal2D& s) {
    return multiply(power_normalize(s), cosine_window(s.height(), s.width()));
}

Signal2D multiply(const Signal2D& a, const Signal2D& b) {
    require_same_shape(a, b, "multiply");
    Signal2D out(a.shape());
    auto o = out.samples();
    const auto x = a.samples();
    const auto y = b.samples();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = x[k] * y[k];
    return out;
}

double dot(const Signal2D& a, const Signal2D& b) {
    require_same_shape(a, b, "dot");
    const auto x = a.samples();
    const auto y = b.samples();
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

double squared_norm(const Signal2D& s) { return dot(s, s); }

}  // namespace cflb
