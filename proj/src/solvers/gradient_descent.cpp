#include <algorithm>
#include <cmath>

#include "cflb/solvers.hpp"

namespace cflb {
namespace {

struct Evaluation {
    double objective = 0.0;
    Signal2D gradient;
};

// Objective and gradient of the masked objective. Touches every training pair.
Evaluation evaluate(const std::vector<Spectrum2D>& xh, const std::vector<Spectrum2D>& yh,
                    const MaskSpec& mask, double lambda, const Signal2D& h) {
    const Spectrum2D c = template_spectrum(pad(h, mask));
    const auto cc = c.coefficients();
    Spectrum2D back(mask.outer);
    auto q = back.coefficients();
    double data = 0.0;
    for (std::size_t i = 0; i < xh.size(); ++i) {
        const auto x = xh[i].coefficients();
        const auto y = yh[i].coefficients();
        for (std::size_t k = 0; k < cc.size(); ++k) {
            const Complex err = x[k] * cc[k] - y[k];
            data += std::norm(err);
            q[k] += x[k] * std::conj(err);
        }
    }
    const double t = static_cast<double>(cc.size());
    Evaluation ev;
    ev.objective = data / (2.0 * t) + 0.5 * lambda * squared_norm(h);
    ev.gradient = crop(idft2(back), mask);
    auto g = ev.gradient.samples();
    const auto hs = h.samples();
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += lambda * hs[k];
    return ev;
}

}  // namespace

GradientDescentResult gradient_descent_train(const RegularizedProblem& p, double step, int iters) {
    p.validate();
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("gradient_descent: step must be positive");
    if (iters < 0) throw InvalidArgument("gradient_descent: iters must be non-negative");

    std::vector<Spectrum2D> xh;
    std::vector<Spectrum2D> yh;
    for (std::size_t i = 0; i < p.xs.size(); ++i) {
        xh.push_back(dft2(p.xs[i]));
        yh.push_back(dft2(p.ys[i]));
    }

    GradientDescentResult res{Signal2D(p.mask.inner), {}};
    Evaluation ev = evaluate(xh, yh, p.mask, p.lambda, res.h);
    const double start = ev.objective;
    res.trace.reserve(static_cast<std::size_t>(iters));
    for (int it = 0; it < iters; ++it) {
        auto hs = res.h.samples();
        const auto gs = ev.gradient.samples();
        for (std::size_t k = 0; k < hs.size(); ++k) hs[k] -= step * gs[k];
        ev = evaluate(xh, yh, p.mask, p.lambda, res.h);
        res.trace.push_back(ev.objective);
        if (!std::isfinite(ev.objective) || ev.objective > 10.0 * start) {
            throw DivergenceError("gradient_descent: objective diverged", res.trace);
        }
    }
    return res;
}

double gradient_descent_safe_step(const RegularizedProblem& p) {
    p.validate();
    const SpectralEnergies e = spectral_energies(p.xs, p.ys);
    double peak = 0.0;
    for (auto z : e.s_xx.coefficients()) peak = std::max(peak, z.real());
    return 1.0 / (peak + p.lambda);
}

}  // namespace cflb
