#include "cflb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cflb/error.hpp"
#include "fft_backend.hpp"

namespace cflb {
namespace {

void require_same_shape(const Spectrum2D& a, const Spectrum2D& b, const char* what) {
    if (a.shape() != b.shape()) throw InvalidArgument(std::string(what) + ": shape mismatch");
}

}  // namespace

Spectrum2D::Spectrum2D(int height, int width) : shape_{height, width} {
    if (height <= 0 || width <= 0) throw InvalidArgument("Spectrum2D: dimensions must be positive");
    coeffs_.assign(shape_.count(), Complex{});
}

Spectrum2D::Spectrum2D(int height, int width, std::vector<Complex> coefficients)
    : shape_{height, width}, coeffs_(std::move(coefficients)) {
    if (height <= 0 || width <= 0) throw InvalidArgument("Spectrum2D: dimensions must be positive");
    if (coeffs_.size() != shape_.count()) {
        throw InvalidArgument("Spectrum2D: coefficient count does not match shape");
    }
    if (!all_finite()) throw InvalidArgument("Spectrum2D: non-finite coefficient");
}

bool Spectrum2D::all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex c) {
        return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
}

Spectrum2D dft2(const Signal2D& s) {
    Spectrum2D out(s.shape());
    auto c = out.coefficients();
    const auto v = s.samples();
    for (std::size_t k = 0; k < v.size(); ++k) c[k] = Complex(v[k], 0.0);
    detail::fft2_inplace(s.shape(), c, detail::FftDirection::forward);
    return out;
}

Spectrum2D idft2_complex(const Spectrum2D& s) {
    Spectrum2D out = s;
    auto c = out.coefficients();
    detail::fft2_inplace(s.shape(), c, detail::FftDirection::inverse);
    const double scale = 1.0 / static_cast<double>(s.size());
    for (auto& z : c) z *= scale;
    return out;
}

Signal2D idft2(const Spectrum2D& s) {
    const Spectrum2D z = idft2_complex(s);
    Signal2D out(s.shape());
    auto o = out.samples();
    double peak = 1.0;
    double residual = 0.0;
    const auto c = z.coefficients();
    for (std::size_t k = 0; k < c.size(); ++k) {
        o[k] = c[k].real();
        peak = std::max(peak, std::abs(c[k]));
        residual = std::max(residual, std::abs(c[k].imag()));
    }
    if (!std::isfinite(peak) || residual > 1e-8 * peak) {
        throw NumericalError("idft2: imaginary residual " + std::to_string(residual) +
                             " exceeds tolerance; spectrum is not Hermitian");
    }
    return out;
}

double SpectralEnergies::mean_auto_energy() const {
    const auto c = s_xx.coefficients();
    double sum = 0.0;
    for (auto z : c) sum += z.real();
    return sum / static_cast<double>(c.size());
}

SpectralEnergies SpectralEnergies::scaled(double factor) const {
    SpectralEnergies out = *this;
    for (auto& z : out.s_xx.coefficients()) z *= factor;
    for (auto& z : out.s_xy.coefficients()) z *= factor;
    out.s_yy *= factor;
    return out;
}

SpectralEnergies spectral_energies_from_spectra(std::span<const Spectrum2D> xs_hat,
                                                std::span<const Spectrum2D> ys_hat) {
    if (xs_hat.empty()) throw InvalidArgument("spectral_energies: empty training set");
    if (xs_hat.size() != ys_hat.size()) {
        throw InvalidArgument("spectral_energies: xs and ys differ in length");
    }
    const Shape shape = xs_hat.front().shape();
    SpectralEnergies e{Spectrum2D(shape), Spectrum2D(shape), 0.0, xs_hat.size()};
    auto sxx = e.s_xx.coefficients();
    auto sxy = e.s_xy.coefficients();
    for (std::size_t i = 0; i < xs_hat.size(); ++i) {
        if (xs_hat[i].shape() != shape || ys_hat[i].shape() != shape) {
            throw InvalidArgument("spectral_energies: shape mismatch in training pair " +
                                  std::to_string(i));
        }
        const auto x = xs_hat[i].coefficients();
        const auto y = ys_hat[i].coefficients();
        for (std::size_t k = 0; k < sxx.size(); ++k) {
            sxx[k] += Complex(std::norm(x[k]), 0.0);
            sxy[k] += y[k] * std::conj(x[k]);
            e.s_yy += std::norm(y[k]);
        }
    }
    return e;
}

SpectralEnergies spectral_energies(std::span<const Signal2D> xs, std::span<const Signal2D> ys) {
    if (xs.empty()) throw InvalidArgument("spectral_energies: empty training set");
    if (xs.size() != ys.size()) throw InvalidArgument("spectral_energies: xs and ys differ in length");
    std::vector<Spectrum2D> xh;
    std::vector<Spectrum2D> yh;
    xh.reserve(xs.size());
    yh.reserve(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].shape() != xs.front().shape() || ys[i].shape() != xs.front().shape()) {
            throw InvalidArgument("spectral_energies: shape mismatch in training pair " +
                                  std::to_string(i));
        }
        xh.push_back(dft2(xs[i]));
        yh.push_back(dft2(ys[i]));
    }
    return spectral_energies_from_spectra(xh, yh);
}

SpectralEnergies online_update(const SpectralEnergies& e, const Signal2D& x, const Signal2D& y,
                               double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("online_update: eta outside [0, 1]");
    if (x.shape() != e.shape() || y.shape() != e.shape()) {
        throw InvalidArgument("online_update: shape mismatch");
    }
    const Spectrum2D xh = dft2(x);
    const Spectrum2D yh = dft2(y);
    SpectralEnergies out = e;
    auto sxx = out.s_xx.coefficients();
    auto sxy = out.s_xy.coefficients();
    const auto xc = xh.coefficients();
    const auto yc = yh.coefficients();
    double syy = 0.0;
    for (std::size_t k = 0; k < sxx.size(); ++k) {
        sxx[k] = eta * Complex(std::norm(xc[k]), 0.0) + (1.0 - eta) * sxx[k];
        sxy[k] = eta * (yc[k] * std::conj(xc[k])) + (1.0 - eta) * sxy[k];
        syy += std::norm(yc[k]);
    }
    out.s_yy = eta * syy + (1.0 - eta) * e.s_yy;
    out.count = e.count + 1;
    return out;
}

Spectrum2D hadamard(const Spectrum2D& a, const Spectrum2D& b) {
    require_same_shape(a, b, "hadamard");
    Spectrum2D out(a.shape());
    auto o = out.coefficients();
    const auto x = a.coefficients();
    const auto y = b.coefficients();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = x[k] * y[k];
    return out;
}

Spectrum2D hadamard_conj(const Spectrum2D& a, const Spectrum2D& b) {
    require_same_shape(a, b, "hadamard_conj");
    Spectrum2D out(a.shape());
    auto o = out.coefficients();
    const auto x = a.coefficients();
    const auto y = b.coefficients();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = x[k] * std::conj(y[k]);
    return out;
}

Spectrum2D conj(const Spectrum2D& a) {
    Spectrum2D out = a;
    for (auto& z : out.coefficients()) z = std::conj(z);
    return out;
}

double squared_norm(const Spectrum2D& a) {
    double s = 0.0;
    for (auto z : a.coefficients()) s += std::norm(z);
    return s;
}

double distance(const Spectrum2D& a, const Spectrum2D& b) {
    require_same_shape(a, b, "distance");
    const auto x = a.coefficients();
    const auto y = b.coefficients();
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += std::norm(x[k] - y[k]);
    return std::sqrt(s);
}

double hermitian_asymmetry(const Spectrum2D& s) {
    const int h = s.height();
    const int w = s.width();
    double worst = 0.0;
    for (int u = 0; u < h; ++u) {
        for (int v = 0; v < w; ++v) {
            const Complex mirror = s((h - u) % h, (w - v) % w);
            worst = std::max(worst, std::abs(s(u, v) - std::conj(mirror)));
        }
    }
    return worst;
}

}  // namespace cflb
