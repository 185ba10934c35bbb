#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "cflb/signal.hpp"

namespace cflb {

using Complex = std::complex<double>;

/// Complex height x width array, row-major. Holds full (unpacked) spectra.
class Spectrum2D {
public:
    Spectrum2D() = default;
    Spectrum2D(int height, int width);
    Spectrum2D(int height, int width, std::vector<Complex> coefficients);
    explicit Spectrum2D(Shape shape) : Spectrum2D(shape.height, shape.width) {}

    [[nodiscard]] int height() const noexcept { return shape_.height; }
    [[nodiscard]] int width() const noexcept { return shape_.width; }
    [[nodiscard]] Shape shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }

    [[nodiscard]] Complex operator()(int u, int v) const noexcept {
        return coeffs_[static_cast<std::size_t>(u) * shape_.width + v];
    }
    Complex& operator()(int u, int v) noexcept {
        return coeffs_[static_cast<std::size_t>(u) * shape_.width + v];
    }
    [[nodiscard]] std::span<const Complex> coefficients() const noexcept { return coeffs_; }
    [[nodiscard]] std::span<Complex> coefficients() noexcept { return coeffs_; }

    [[nodiscard]] bool all_finite() const noexcept;

    friend bool operator==(const Spectrum2D&, const Spectrum2D&) = default;

private:
    Shape shape_;
    std::vector<Complex> coeffs_;
};

/// Unnormalised forward 2D DFT: X(u,v) = sum x(i,j) exp(-2 pi i (ui/H + vj/W)).
Spectrum2D dft2(const Signal2D& s);

/// Inverse DFT with the 1/(H W) factor. The imaginary residual must stay below
/// 1e-8 relative to max(1, peak magnitude); otherwise NumericalError.
Signal2D idft2(const Spectrum2D& s);

/// Inverse DFT keeping the complex result (no realness check).
Spectrum2D idft2_complex(const Spectrum2D& s);

/// Sufficient statistics of a training set:
///   s_xx = sum_i x^_i o conj(x^_i),  s_xy = sum_i y^_i o conj(x^_i),
///   s_yy = sum_i ||y^_i||^2 (scalar; enables O(T) objective evaluation).
struct SpectralEnergies {
    Spectrum2D s_xx;
    Spectrum2D s_xy;
    double s_yy = 0.0;
    std::size_t count = 0;

    [[nodiscard]] Shape shape() const noexcept { return s_xx.shape(); }
    /// Mean of Re(s_xx) over all frequency bins.
    [[nodiscard]] double mean_auto_energy() const;
    /// Every field multiplied by `factor` (count unchanged).
    [[nodiscard]] SpectralEnergies scaled(double factor) const;
};

/// Accumulates in input order.
SpectralEnergies spectral_energies(std::span<const Signal2D> xs, std::span<const Signal2D> ys);

/// Same as above but from precomputed spectra.
SpectralEnergies spectral_energies_from_spectra(std::span<const Spectrum2D> xs_hat,
                                                std::span<const Spectrum2D> ys_hat);

/// Exponential moving average of the energies with rate eta in [0, 1].
SpectralEnergies online_update(const SpectralEnergies& e, const Signal2D& x, const Signal2D& y,
                               double eta);

// Hadamard algebra.
Spectrum2D hadamard(const Spectrum2D& a, const Spectrum2D& b);
Spectrum2D conj(const Spectrum2D& a);
/// a o conj(b)
Spectrum2D hadamard_conj(const Spectrum2D& a, const Spectrum2D& b);
double squared_norm(const Spectrum2D& a);
/// ||a - b||_2
double distance(const Spectrum2D& a, const Spectrum2D& b);

/// Largest |X(u,v) - conj(X(-u,-v))| over the spectrum.
double hermitian_asymmetry(const Spectrum2D& s);

}  // namespace cflb
