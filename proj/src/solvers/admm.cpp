#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "cflb/solvers.hpp"

namespace cflb {
namespace {

void require_finite(const Spectrum2D& s, const char* stage) {
    if (!s.all_finite()) {
        throw NumericalError(std::string("cflb_admm: non-finite values in the ") + stage);
    }
}

void require_finite(const Signal2D& s, const char* stage) {
    for (double v : s.samples()) {
        if (!std::isfinite(v)) {
            throw NumericalError(std::string("cflb_admm: non-finite values in the ") + stage);
        }
    }
}

}  // namespace

void AdmmParams::validate() const {
    if (!(mu0 > 0.0) || !(mu_max > 0.0) || !std::isfinite(mu0) || !std::isfinite(mu_max)) {
        throw InvalidArgument("AdmmParams: mu0 and mu_max must be positive");
    }
    if (mu0 > mu_max) throw InvalidArgument("AdmmParams: mu0 exceeds mu_max");
    if (!(beta > 1.0) || !std::isfinite(beta)) throw InvalidArgument("AdmmParams: beta must exceed 1");
    if (max_iters <= 0) throw InvalidArgument("AdmmParams: max_iters must be positive");
    if (!(rel_tol >= 0.0)) throw InvalidArgument("AdmmParams: rel_tol must be non-negative");
    if (change_tol && !(*change_tol >= 0.0)) throw InvalidArgument("AdmmParams: change_tol must be non-negative");
}

Spectrum2D solve_g(const SpectralEnergies& e, const Spectrum2D& h_hat, const Spectrum2D& zeta_hat,
                   double mu) {
    if (!(mu > 0.0)) throw InvalidArgument("solve_g: mu must be positive");
    if (h_hat.shape() != e.shape() || zeta_hat.shape() != e.shape()) {
        throw InvalidArgument("solve_g: shape mismatch");
    }
    Spectrum2D g(e.shape());
    auto out = g.coefficients();
    const auto sxx = e.s_xx.coefficients();
    const auto sxy = e.s_xy.coefficients();
    const auto h = h_hat.coefficients();
    const auto z = zeta_hat.coefficients();
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = (sxy[k] + mu * h[k] - z[k]) / (sxx[k].real() + mu);
    }
    return g;
}

Signal2D solve_h(const Signal2D& g, const Signal2D& l, double lambda, double mu,
                 const MaskSpec& mask) {
    mask.validate();
    if (g.shape() != mask.inner || l.shape() != mask.inner) {
        throw InvalidArgument("solve_h: g and l must have the inner shape");
    }
    const double denom = mu + lambda / static_cast<double>(mask.outer.count());
    if (!(denom > 0.0)) throw InvalidArgument("solve_h: mu + lambda/T must be positive");
    Signal2D h(mask.inner);
    auto out = h.samples();
    const auto gs = g.samples();
    const auto ls = l.samples();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (mu * gs[k] + ls[k]) / denom;
    return h;
}

Spectrum2D multiplier_update(const Spectrum2D& zeta_hat, const Spectrum2D& g_hat,
                             const Spectrum2D& h_hat, double mu) {
    if (g_hat.shape() != zeta_hat.shape() || h_hat.shape() != zeta_hat.shape()) {
        throw InvalidArgument("multiplier_update: shape mismatch");
    }
    Spectrum2D out = zeta_hat;
    auto z = out.coefficients();
    const auto g = g_hat.coefficients();
    const auto h = h_hat.coefficients();
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += mu * (g[k] - h[k]);
    return out;
}

double penalty_update(double mu, const AdmmParams& params) {
    return std::min(params.mu_max, params.beta * mu);
}

AdmmState admm_stationary_state(const SpectralEnergies& e, const MaskSpec& mask, const Signal2D& h, double mu) {
    mask.validate();
    if (e.shape() != mask.outer || h.shape() != mask.inner) {
        throw InvalidArgument("admm_stationary_state: shapes do not match the mask");
    }
    AdmmState st;
    st.h = h;
    st.g_hat = template_spectrum(pad(h, mask));
    st.zeta_hat = Spectrum2D(mask.outer);
    const auto sxx = e.s_xx.coefficients();
    const auto sxy = e.s_xy.coefficients();
    const auto g = st.g_hat.coefficients();
    auto z = st.zeta_hat.coefficients();
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = sxy[k] - sxx[k] * g[k];
    st.mu = mu;
    st.converged = true;
    return st;
}

AdmmResult cflb_admm_solve(const SpectralEnergies& e, const MaskSpec& mask, double lambda,
                           const AdmmParams& params, const AdmmState* warm) {
    using clock = std::chrono::steady_clock;
    mask.validate();
    params.validate();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("cflb_admm: lambda must be positive");
    }
    if (e.shape() != mask.outer) throw InvalidArgument("cflb_admm: energies do not match the mask");
    if (e.count == 0) throw InvalidArgument("cflb_admm: energies hold no training pairs");

    double scale = 1.0;
    if (params.units == PenaltyUnits::relative) {
        scale = e.mean_auto_energy();
        if (!(scale > 0.0)) throw DegenerateInput("cflb_admm: training windows carry no energy");
    }
    // The spectral data term is T times the spatial one; scaling the ridge weight
    // the same way keeps the minimiser that of the masked objective with `lambda`.
    const double spectral_lambda = lambda * static_cast<double>(mask.outer.count());

    AdmmState st;
    if (warm != nullptr) {
        if (warm->h.shape() != mask.inner || warm->zeta_hat.shape() != mask.outer) {
            throw InvalidArgument("cflb_admm: warm start does not match the mask");
        }
        st.h = warm->h;
        st.zeta_hat = warm->zeta_hat;
        st.mu = warm->mu > 0.0 ? std::min(warm->mu, params.mu_max) : params.mu0;
    } else {
        st.h = Signal2D(mask.inner);
        st.zeta_hat = Spectrum2D(mask.outer);
        st.mu = params.mu0;
    }
    Spectrum2D h_hat = template_spectrum(pad(st.h, mask));
    st.trace.reserve(static_cast<std::size_t>(params.max_iters));

    for (int it = 0; it < params.max_iters; ++it) {
        const auto t0 = clock::now();
        const double mu = st.mu * scale;

        st.g_hat = solve_g(e, h_hat, st.zeta_hat, mu);
        require_finite(st.g_hat, "g-subproblem");

        const Signal2D g = crop(template_spatial(st.g_hat), mask);
        const Signal2D l = crop(template_spatial(st.zeta_hat), mask);
        Signal2D h_prev = std::move(st.h);
        st.h = solve_h(g, l, spectral_lambda, mu, mask);
        require_finite(st.h, "h-subproblem");

        h_hat = template_spectrum(pad(st.h, mask));
        st.zeta_hat = multiplier_update(st.zeta_hat, st.g_hat, h_hat, mu);
        require_finite(st.zeta_hat, "multiplier update");

        AdmmIteration rec;
        rec.mu = st.mu;
        rec.primal_residual = distance(st.g_hat, h_hat);
        const double ref = std::sqrt(std::max(squared_norm(st.g_hat), squared_norm(h_hat)));
        rec.relative_residual = ref > 0.0 ? rec.primal_residual / ref : 0.0;
        const double h_norm = std::sqrt(squared_norm(st.h));
        double moved = 0.0;
        for (std::size_t k = 0; k < st.h.samples().size(); ++k) {
            const double d = st.h.samples()[k] - h_prev.samples()[k];
            moved += d * d;
        }
        rec.relative_change = h_norm > 0.0 ? std::sqrt(moved) / h_norm : 0.0;
        rec.objective = masked_objective(e, mask, lambda, st.h);
        if (!std::isfinite(rec.objective)) throw NumericalError("cflb_admm: non-finite objective");

        st.mu = penalty_update(st.mu, params);
        ++st.iter;
        rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        st.trace.push_back(rec);

        // A large penalty drives g and h together long before h settles, so callers
        // that need the actual minimiser also bound the step in h.
        if (rec.relative_residual <= params.rel_tol &&
            (!params.change_tol || rec.relative_change <= *params.change_tol)) {
            st.converged = true;
            break;
        }
    }

    AdmmResult out;
    out.model = FilterModel::from_filter(st.h, mask, e, lambda);
    out.state = std::move(st);
    return out;
}

AdmmResult cflb_admm_train(const RegularizedProblem& p, const AdmmParams& params) {
    p.validate();
    return cflb_admm_solve(spectral_energies(p.xs, p.ys), p.mask, p.lambda, params);
}

}  // namespace cflb
