#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cflb {

struct Shape {
    int height = 0;
    int width = 0;

    [[nodiscard]] std::size_t count() const noexcept {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Integer pixel position (row, col).
struct Pixel {
    int row = 0;
    int col = 0;
    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Circular shift amount, taken modulo the operand's shape.
struct ShiftVec {
    long dy = 0;
    long dx = 0;
};

/// Real-valued height x width array, row-major. Samples are always finite.
class Signal2D {
public:
    Signal2D() = default;
    Signal2D(int height, int width);
    Signal2D(int height, int width, std::vector<double> samples);
    explicit Signal2D(Shape shape) : Signal2D(shape.height, shape.width) {}

    [[nodiscard]] int height() const noexcept { return shape_.height; }
    [[nodiscard]] int width() const noexcept { return shape_.width; }
    [[nodiscard]] Shape shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }

    [[nodiscard]] double operator()(int r, int c) const noexcept {
        return samples_[static_cast<std::size_t>(r) * shape_.width + c];
    }
    double& operator()(int r, int c) noexcept {
        return samples_[static_cast<std::size_t>(r) * shape_.width + c];
    }

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] std::span<double> samples() noexcept { return samples_; }
    [[nodiscard]] const std::vector<double>& vector() const noexcept { return samples_; }

    /// Throws InvalidArgument if any sample is NaN or infinite.
    void check_finite() const;

    friend bool operator==(const Signal2D&, const Signal2D&) = default;

private:
    Shape shape_;
    std::vector<double> samples_;
};

/// Placement of a D-sized filter support inside a T-sized training window.
/// crop() is the selection matrix applied to a window, pad() its transpose.
struct MaskSpec {
    Shape outer;
    Shape inner;
    Pixel offset;

    /// Inner rectangle centred in outer (floor division).
    static MaskSpec centered(Shape outer, Shape inner);
    /// inner == outer, offset (0, 0).
    static MaskSpec identity(Shape shape);

    /// Throws InvalidArgument unless positive shapes and inner fits inside outer.
    void validate() const;

    /// Pixel of the padded filter that a correlation lag of (0, 0) aligns with an
    /// image location: located position = peak lag + anchor (mod outer).
    [[nodiscard]] Pixel anchor() const noexcept {
        return {offset.row + inner.height / 2, offset.col + inner.width / 2};
    }
    [[nodiscard]] bool is_identity() const noexcept {
        return inner == outer && offset == Pixel{};
    }
    friend bool operator==(const MaskSpec&, const MaskSpec&) = default;
};

/// out(i, j) = s((i - dy) mod H, (j - dx) mod W).
Signal2D circular_shift(const Signal2D& s, ShiftVec d);

/// Zero mean, unit population standard deviation. Throws DegenerateInput on
/// constant input.
Signal2D power_normalize(const Signal2D& s);

/// Separable Hann window, zero at the borders, values in [0, 1].
Signal2D cosine_window(int height, int width);

/// Extract the inner rectangle of an outer-shaped signal.
Signal2D crop(const Signal2D& s, const MaskSpec& m);
/// Place an inner-shaped signal at the mask offset inside zeros.
Signal2D pad(const Signal2D& s, const MaskSpec& m);

/// exp(-((i - r)^2 + (j - c)^2) / (2 sigma^2)); not wrapped.
Signal2D gaussian_response(int height, int width, Pixel center, double sigma);

/// Training target for a masked filter: Gaussian at `center`, circularly shifted so
/// that a correlation peak at lag tau means an object at tau + mask.anchor().
Signal2D anchored_response(const MaskSpec& mask, Pixel center, double sigma);

/// power_normalize followed by multiplication with cosine_window.
Signal2D preprocess(const Signal2D& s);

/// Elementwise product of two equally shaped signals.
Signal2D multiply(const Signal2D& a, const Signal2D& b);

double dot(const Signal2D& a, const Signal2D& b);
double squared_norm(const Signal2D& s);

}  // namespace cflb
