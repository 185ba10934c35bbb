#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cflb/error.hpp"
#include "cflb/signal.hpp"
#include "cflb/spectral.hpp"

namespace cflb {

/// Training set for the masked objective
///   E(h) = 1/2 sum_i sum_j (y_i(j) - h' P x_i[tau_j])^2 + lambda/2 ||h||^2
/// with j running over all T circular shifts of the outer window.
struct RegularizedProblem {
    std::vector<Signal2D> xs;
    std::vector<Signal2D> ys;
    double lambda = 1e-2;
    MaskSpec mask;

    /// Throws InvalidArgument on empty sets, shape mismatches or lambda <= 0.
    void validate() const;
};

/// Units in which AdmmParams::mu0 and mu_max are expressed.
enum class PenaltyUnits {
    /// Multiples of the mean auto-spectral energy per frequency bin. Scale-free in
    /// N, T and image contrast.
    relative,
    /// Raw values added to s_xx in the g-update.
    absolute,
};

struct AdmmParams {
    double mu0 = 0.25;
    double beta = 1.1;
    double mu_max = 2.0;
    int max_iters = 20;
    double rel_tol = 1e-3;
    PenaltyUnits units = PenaltyUnits::relative;
    /// When set, stopping also needs ||h_k - h_{k-1}|| / ||h_k|| <= change_tol.
    std::optional<double> change_tol;

    void validate() const;
};

struct AdmmIteration {
    double objective = 0.0;          // masked objective at the current h
    double primal_residual = 0.0;    // ||g^ - h^||_2
    double relative_residual = 0.0;  // primal_residual / max(||g^||, ||h^||)
    double relative_change = 0.0;    // ||h_k - h_{k-1}|| / ||h_k||
    double mu = 0.0;                 // penalty used in this iteration (parameter units)
    double seconds = 0.0;
};

/// Solver state. Frequency-domain iterates hold template spectra, i.e. conj(dft2(.))
/// of the corresponding padded spatial quantities, so the closed-form updates read
/// exactly like their textbook forms.
struct AdmmState {
    Spectrum2D g_hat;
    Signal2D h;
    Spectrum2D zeta_hat;
    double mu = 0.0;  // next penalty, parameter units
    int iter = 0;
    bool converged = false;
    std::vector<AdmmIteration> trace;
};

/// Trained filter plus what online adaptation needs.
struct FilterModel {
    Signal2D h;                // spatial filter, mask.inner shape
    Spectrum2D h_hat_padded;   // dft2(pad(h, mask))
    SpectralEnergies energies;
    MaskSpec mask;
    double lambda = 0.0;

    static FilterModel from_filter(Signal2D h, const MaskSpec& mask, SpectralEnergies energies,
                                   double lambda);
};

struct AdmmResult {
    FilterModel model;
    AdmmState state;
};

/// Template spectrum of a spatial signal: conj(dft2(s)).
Spectrum2D template_spectrum(const Signal2D& s);
/// Inverse of template_spectrum: idft2(conj(t)).
Signal2D template_spatial(const Spectrum2D& t);

// ---------------------------------------------------------------------------
// Closed form and exact oracles

/// Unmasked closed form: template spectrum s_xy / (s_xx + lambda). Requires lambda > 0.
FilterModel mosse_train(std::span<const Signal2D> xs, std::span<const Signal2D> ys, double lambda);
FilterModel mosse_from_energies(const SpectralEnergies& e, double lambda);

/// Largest filter (element count) the dense oracles accept.
inline constexpr std::size_t kOracleMaxElements = 4096;

/// Dense solve of the unmasked ridge regression by explicit enumeration of the D
/// circular shifts. lambda >= 0; a singular system raises NumericalError.
Signal2D spatial_ridge_oracle(std::span<const Signal2D> xs, std::span<const Signal2D> ys,
                              double lambda);

/// Dense solve of the masked objective: all T shifts, each cropped to the mask.
Signal2D masked_spatial_oracle(const RegularizedProblem& p);

/// Same minimiser as masked_spatial_oracle, with the normal equations assembled from
/// spectral energies in O(D^2) instead of enumerating shifts.
Signal2D masked_oracle_from_energies(const SpectralEnergies& e, const MaskSpec& mask, double lambda);

/// Masked objective evaluated by enumerating every cropped shift. O(N T D).
double masked_objective_enumerated(const RegularizedProblem& p, const Signal2D& h);

/// Masked objective evaluated from spectral energies in O(T).
double masked_objective(const SpectralEnergies& e, const MaskSpec& mask, double lambda,
                        const Signal2D& h);

// ---------------------------------------------------------------------------
// ADMM

/// g^ = (s_xy + mu h^ - zeta^) / (s_xx + mu), mu in absolute units.
Spectrum2D solve_g(const SpectralEnergies& e, const Spectrum2D& h_hat, const Spectrum2D& zeta_hat,
                   double mu);

/// h = (mu g + l) / (mu + lambda / T), T = mask.outer element count, g and l of the
/// inner shape. `lambda` weighs ||h||^2 against the unnormalised spectral data term.
Signal2D solve_h(const Signal2D& g, const Signal2D& l, double lambda, double mu,
                 const MaskSpec& mask);

/// zeta^ + mu (g^ - h^)
Spectrum2D multiplier_update(const Spectrum2D& zeta_hat, const Spectrum2D& g_hat,
                             const Spectrum2D& h_hat, double mu);

/// min(mu_max, beta mu)
double penalty_update(double mu, const AdmmParams& params);

/// Runs ADMM on precomputed energies. `warm` (optional) supplies h, zeta^ and mu.
AdmmResult cflb_admm_solve(const SpectralEnergies& e, const MaskSpec& mask, double lambda,
                           const AdmmParams& params, const AdmmState* warm = nullptr);

/// ADMM state at which every step leaves h unchanged: g^ = h^ and
/// zeta^ = s_xy - s_xx o h^. Only a fixed point when h minimises the masked objective.
AdmmState admm_stationary_state(const SpectralEnergies& e, const MaskSpec& mask, const Signal2D& h, double mu);

/// Precomputes energies from the problem then runs cflb_admm_solve.
AdmmResult cflb_admm_train(const RegularizedProblem& p, const AdmmParams& params);

// ---------------------------------------------------------------------------
// Reference first-order baseline

struct GradientDescentResult {
    Signal2D h;
    std::vector<double> trace;  // objective after each iteration
};

/// Raised when the objective exceeds 10x its starting value.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, std::vector<double> trace)
        : NumericalError(what), trace_(std::move(trace)) {}
    [[nodiscard]] const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// Plain gradient descent on the masked objective from h = 0. Every iteration
/// re-correlates the whole training set.
GradientDescentResult gradient_descent_train(const RegularizedProblem& p, double step, int iters);

/// 1 / L where L = max(Re s_xx) + lambda bounds the Hessian of the masked objective.
double gradient_descent_safe_step(const RegularizedProblem& p);

// ---------------------------------------------------------------------------
// Boundary-effect accounting

struct ShiftCount {
    long unaffected = 0;
    long total = 0;
};

/// Counts, over the T circular shifts of a length-T window, those whose cropped
/// length-D support (at `offset`) contains no wrapped-around sample.
ShiftCount count_unaffected_shifts(int window, int filter, int offset = 0);

}  // namespace cflb
