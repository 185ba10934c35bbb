#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cflb/solvers.hpp"
#include "support.hpp"

namespace cflb::tsup {

// Central-difference gradient of f over all real parameters produced by unpack.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> p, double step) {
    std::vector<double> g(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double keep = p[k];
        p[k] = keep + step;
        const double up = f(p);
        p[k] = keep - step;
        const double down = f(p);
        p[k] = keep;
        g[k] = (up - down) / (2 * step);
    }
    return g;
}

inline double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct GProblem {
    std::vector<Spectrum2D> xh, yh;
    Spectrum2D h_hat, zeta_hat;
    double mu = 1.0;
};

// 1/2 sum_i ||x^_i o g^ - y^_i||^2 + Re<zeta^, g^ - h^> + mu/2 ||g^ - h^||^2,
// g^ given as interleaved (re, im) per bin.
inline double g_objective(const GProblem& p, const std::vector<double>& g) {
    double f = 0.0;
    for (std::size_t k = 0; k < p.h_hat.size(); ++k) {
        const Complex gk(g[2 * k], g[2 * k + 1]);
        for (std::size_t i = 0; i < p.xh.size(); ++i) {
            f += 0.5 * std::norm(p.xh[i].coefficients()[k] * gk - p.yh[i].coefficients()[k]);
        }
        const Complex d = gk - p.h_hat.coefficients()[k];
        f += (std::conj(p.zeta_hat.coefficients()[k]) * d).real() + 0.5 * p.mu * std::norm(d);
    }
    return f;
}

inline GProblem random_g_problem(std::mt19937_64& rng, Shape s, int n, double mu) {
    GProblem p;
    for (int i = 0; i < n; ++i) {
        p.xh.push_back(dft2(random_signal(s, rng)));
        p.yh.push_back(dft2(random_signal(s, rng)));
    }
    p.h_hat = template_spectrum(random_signal(s, rng));
    p.zeta_hat = template_spectrum(random_signal(s, rng, 5.0));
    p.mu = mu;
    return p;
}

inline std::vector<double> interleave(const Spectrum2D& s) {
    std::vector<double> out;
    for (const Complex c : s.coefficients()) {
        out.push_back(c.real());
        out.push_back(c.imag());
    }
    return out;
}

// ||grad f(g*)|| / ||grad f(0)||, gradients by central differences.
inline double g_stationarity(const GProblem& p, const Spectrum2D& g_star) {
    auto f = [&](const std::vector<double>& v) { return g_objective(p, v); };
    const auto at_star = fd_gradient(f, interleave(g_star), 1e-3);
    const auto at_zero = fd_gradient(f, std::vector<double>(2 * g_star.size(), 0.0), 1e-3);
    return norm(at_star) / norm(at_zero);
}

struct HProblem {
    MaskSpec mask;
    Spectrum2D g_hat, zeta_hat;
    double lambda = 1.0;  // weight of lambda/2 ||h||^2 next to the spectral terms
    double mu = 1.0;
};

// lambda/2 ||h||^2 + Re<zeta^, g^ - h^> + mu/2 ||g^ - h^||^2 with h^ = conj(dft2(pad h)).
inline double h_objective(const HProblem& p, const std::vector<double>& hv) {
    const Signal2D h(p.mask.inner.height, p.mask.inner.width, hv);
    const Spectrum2D hh = template_spectrum(pad(h, p.mask));
    double f = 0.5 * p.lambda * squared_norm(h);
    for (std::size_t k = 0; k < hh.size(); ++k) {
        const Complex d = p.g_hat.coefficients()[k] - hh.coefficients()[k];
        f += (std::conj(p.zeta_hat.coefficients()[k]) * d).real() + 0.5 * p.mu * std::norm(d);
    }
    return f;
}

inline HProblem random_h_problem(std::mt19937_64& rng, const MaskSpec& m, double lambda, double mu) {
    return {m, template_spectrum(random_signal(m.outer, rng)), template_spectrum(random_signal(m.outer, rng, 3.0)),
            lambda, mu};
}

// Candidate closed form h = (mu g + l) / (mu + lambda / divisor).
inline Signal2D h_candidate(const HProblem& p, double divisor) {
    const Signal2D g = crop(template_spatial(p.g_hat), p.mask);
    const Signal2D l = crop(template_spatial(p.zeta_hat), p.mask);
    Signal2D h(p.mask.inner);
    for (std::size_t k = 0; k < h.size(); ++k) {
        h.samples()[k] = (p.mu * g.samples()[k] + l.samples()[k]) / (p.mu + p.lambda / divisor);
    }
    return h;
}

inline double h_stationarity(const HProblem& p, const Signal2D& h_star) {
    auto f = [&](const std::vector<double>& v) { return h_objective(p, v); };
    const auto at_star = fd_gradient(f, h_star.vector(), 1e-3);
    const auto at_zero = fd_gradient(f, std::vector<double>(h_star.size(), 0.0), 1e-3);
    return norm(at_star) / norm(at_zero);
}

}  // namespace cflb::tsup
