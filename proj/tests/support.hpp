#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "cflb/signal.hpp"
#include "cflb/spectral.hpp"

namespace cflb::tsup {

inline Signal2D random_signal(Shape s, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Signal2D out(s);
    for (auto& v : out.samples()) v = n(rng);
    return out;
}

// O(D^2) DFT straight from the definition.
inline std::vector<std::complex<double>> naive_dft2(const Signal2D& x) {
    const int h = x.height();
    const int w = x.width();
    std::vector<std::complex<double>> out(x.size());
    for (int u = 0; u < h; ++u) {
        for (int v = 0; v < w; ++v) {
            std::complex<double> acc = 0.0;
            for (int i = 0; i < h; ++i) {
                for (int j = 0; j < w; ++j) {
                    const double ph = -2.0 * std::numbers::pi * (static_cast<double>(u) * i / h + static_cast<double>(v) * j / w);
                    acc += x(i, j) * std::complex<double>(std::cos(ph), std::sin(ph));
                }
            }
            out[static_cast<std::size_t>(u) * w + v] = acc;
        }
    }
    return out;
}

// r(t) = sum_k h(k) x(k + t), indices mod the shape.
inline Signal2D naive_correlate(const Signal2D& h, const Signal2D& x) {
    const int H = x.height();
    const int W = x.width();
    Signal2D r(H, W);
    for (int ty = 0; ty < H; ++ty) {
        for (int tx = 0; tx < W; ++tx) {
            double acc = 0.0;
            for (int i = 0; i < H; ++i) {
                for (int j = 0; j < W; ++j) acc += h(i, j) * x((i + ty) % H, (j + tx) % W);
            }
            r(ty, tx) = acc;
        }
    }
    return r;
}

inline double rel_err(std::span<const double> a, std::span<const double> b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += (a[k] - b[k]) * (a[k] - b[k]);
        den += b[k] * b[k];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

inline double rel_err(const Signal2D& a, const Signal2D& b) { return rel_err(a.samples(), b.samples()); }

}  // namespace cflb::tsup
