#include <gtest/gtest.h>

#include <cmath>

#include "cflb/error.hpp"
#include "cflb/solvers.hpp"
#include "fd.hpp"
#include "support.hpp"

using namespace cflb;
using cflb::tsup::random_signal;
using cflb::tsup::rel_err;

namespace {

// Masked objective computed straight from the definition using naive correlation
// of the padded filter.
double naive_objective(const RegularizedProblem& p, const Signal2D& h) {
    const Signal2D hp = pad(h, p.mask);
    double f = 0.5 * p.lambda * squared_norm(h);
    for (std::size_t i = 0; i < p.xs.size(); ++i) {
        const Signal2D r = cflb::tsup::naive_correlate(hp, p.xs[i]);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double d = p.ys[i].samples()[k] - r.samples()[k];
            f += 0.5 * d * d;
        }
    }
    return f;
}

double naive_stationarity(const RegularizedProblem& p, const Signal2D& h) {
    auto f = [&](const std::vector<double>& v) {
        return naive_objective(p, Signal2D(p.mask.inner.height, p.mask.inner.width, v));
    };
    const auto g = cflb::tsup::fd_gradient(f, h.vector(), 1e-4);
    const auto g0 = cflb::tsup::fd_gradient(f, std::vector<double>(h.size(), 0.0), 1e-4);
    return cflb::tsup::norm(g) / cflb::tsup::norm(g0);
}

RegularizedProblem random_problem(std::mt19937_64& rng, Shape outer, Shape inner, int n, double lambda) {
    RegularizedProblem p;
    p.mask = MaskSpec::centered(outer, inner);
    p.lambda = lambda;
    std::uniform_int_distribution<int> r(0, outer.height - 1), c(0, outer.width - 1);
    for (int i = 0; i < n; ++i) {
        p.xs.push_back(random_signal(outer, rng));
        p.ys.push_back(anchored_response(p.mask, {r(rng), c(rng)}, 1.5));
    }
    return p;
}

}  // namespace

TEST(ClosedForm, MosseMatchesSpatialRidgeOracle) {
    std::mt19937_64 rng(20);
    for (double lambda : {0.01, 1.0}) {
        auto p = random_problem(rng, {6, 5}, {6, 5}, 2, lambda);
        const FilterModel m = mosse_train(p.xs, p.ys, lambda);
        EXPECT_LT(rel_err(m.h, spatial_ridge_oracle(p.xs, p.ys, lambda)), 1e-6);
    }
}

TEST(ClosedForm, SpatialOracleIsStationaryForTheNaiveObjective) {
    std::mt19937_64 rng(21);
    auto p = random_problem(rng, {6, 6}, {6, 6}, 2, 0.1);
    p.mask = MaskSpec::identity({6, 6});
    EXPECT_LT(naive_stationarity(p, spatial_ridge_oracle(p.xs, p.ys, p.lambda)), 1e-8);
}

TEST(ClosedForm, MaskedOracleIsStationaryForTheNaiveObjective) {
    std::mt19937_64 rng(22);
    const auto p = random_problem(rng, {10, 9}, {4, 5}, 3, 0.05);
    EXPECT_LT(naive_stationarity(p, masked_spatial_oracle(p)), 1e-8);
}

TEST(ClosedForm, ObjectiveFormsAgree) {
    std::mt19937_64 rng(23);
    const auto p = random_problem(rng, {12, 10}, {5, 4}, 3, 0.3);
    const Signal2D h = random_signal(p.mask.inner, rng);
    const double naive = naive_objective(p, h);
    EXPECT_NEAR(masked_objective_enumerated(p, h), naive, 1e-10 * naive);
    EXPECT_NEAR(masked_objective(spectral_energies(p.xs, p.ys), p.mask, p.lambda, h), naive, 1e-10 * naive);
}

TEST(ClosedForm, RidgeOracleAllowsZeroLambdaButRejectsSingular) {
    std::mt19937_64 rng(24);
    auto p = random_problem(rng, {4, 4}, {4, 4}, 3, 0.0);
    EXPECT_NO_THROW(spatial_ridge_oracle(p.xs, p.ys, 0.0));
    std::vector<Signal2D> zeros{Signal2D(4, 4)}, ys{Signal2D(4, 4)};
    EXPECT_THROW(spatial_ridge_oracle(zeros, ys, 0.0), NumericalError);
    EXPECT_THROW(spatial_ridge_oracle(p.xs, p.ys, -1.0), InvalidArgument);
}

TEST(ClosedForm, InputValidation) {
    std::mt19937_64 rng(25);
    auto p = random_problem(rng, {8, 8}, {4, 4}, 2, 0.1);
    EXPECT_THROW(mosse_train(p.xs, p.ys, 0.0), InvalidArgument);
    p.ys.pop_back();
    EXPECT_THROW(masked_spatial_oracle(p), InvalidArgument);
    auto big = random_problem(rng, {80, 80}, {80, 80}, 1, 0.1);
    EXPECT_THROW(spatial_ridge_oracle(big.xs, big.ys, 0.1), InvalidArgument);
}

TEST(ClosedForm, UnaffectedShiftCountMatchesEnumeration) {
    for (int t = 1; t <= 20; ++t) {
        for (int d = 1; d <= t; ++d) {
            for (int off = 0; off + d <= t; ++off) {
                long want = 0;
                for (int j = 0; j < t; ++j) {
                    bool wrapped = false;
                    // contiguous source run, possibly lying entirely past the wrap
                    for (int k = 0; k < d; ++k) wrapped |= (off + j + k) % t != (off + j) % t + k;
                    want += wrapped ? 0 : 1;
                }
                const ShiftCount got = count_unaffected_shifts(t, d, off);
                EXPECT_EQ(got.unaffected, want);
                EXPECT_EQ(got.total, t);
            }
        }
    }
    EXPECT_EQ(count_unaffected_shifts(8, 8).unaffected, 1);
    EXPECT_THROW(count_unaffected_shifts(4, 5), InvalidArgument);
}

TEST(Admm, GStepFixedPoint) {
    std::mt19937_64 rng(30);
    std::vector<Signal2D> xs{random_signal({6, 6}, rng), random_signal({6, 6}, rng)};
    std::vector<Signal2D> ys{random_signal({6, 6}, rng), random_signal({6, 6}, rng)};
    SpectralEnergies e = spectral_energies(xs, ys);
    const Spectrum2D h_hat = template_spectrum(random_signal({6, 6}, rng));
    e.s_xy = hadamard(e.s_xx, h_hat);
    const Spectrum2D g = solve_g(e, h_hat, Spectrum2D(6, 6), 0.7);
    EXPECT_LT(distance(g, h_hat), 1e-12 * std::sqrt(squared_norm(h_hat)));
    EXPECT_THROW(solve_g(e, h_hat, Spectrum2D(6, 6), 0.0), InvalidArgument);
}

TEST(Admm, GStepIsStationary) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 3; ++trial) {
        const auto p = cflb::tsup::random_g_problem(rng, {5, 6}, 3, 2.5);
        const SpectralEnergies e = spectral_energies_from_spectra(p.xh, p.yh);
        EXPECT_LT(cflb::tsup::g_stationarity(p, solve_g(e, p.h_hat, p.zeta_hat, p.mu)), 1e-6);
    }
}

TEST(Admm, HStepScalingValidatedByFiniteDifferences) {
    std::mt19937_64 rng(32);
    const MaskSpec m = MaskSpec::centered({10, 8}, {4, 3});
    const double t = static_cast<double>(m.outer.count());
    const double d = static_cast<double>(m.inner.count());
    const auto p = cflb::tsup::random_h_problem(rng, m, 0.6 * t, 1.3);
    const Signal2D h = solve_h(crop(template_spatial(p.g_hat), m), crop(template_spatial(p.zeta_hat), m), p.lambda,
                               p.mu, m);
    EXPECT_LT(cflb::tsup::h_stationarity(p, h), 1e-6);
    EXPECT_LT(rel_err(h, cflb::tsup::h_candidate(p, t)), 1e-12);
    EXPECT_GT(cflb::tsup::h_stationarity(p, cflb::tsup::h_candidate(p, std::sqrt(t))), 1e-3);
    EXPECT_GT(cflb::tsup::h_stationarity(p, cflb::tsup::h_candidate(p, d)), 1e-3);
}

TEST(Admm, PenaltyScheduleClampsAtMax) {
    AdmmParams a;
    a.mu0 = 1e-2;
    a.beta = 1.1;
    a.mu_max = 20.0;
    double mu = a.mu0;
    int steps = 0;
    for (; steps < 200 && mu < 20.0; ++steps) {
        const double next = penalty_update(mu, a);
        EXPECT_GE(next, mu);
        mu = next;
    }
    EXPECT_EQ(mu, 20.0);
    EXPECT_EQ(penalty_update(mu, a), 20.0);
    EXPECT_EQ(steps, 80);  // ceil(log(2000) / log(1.1))
}

TEST(Admm, ParamValidation) {
    AdmmParams a;
    a.beta = 1.0;
    EXPECT_THROW(a.validate(), InvalidArgument);
    a = AdmmParams{};
    a.mu0 = 5.0;
    EXPECT_THROW(a.validate(), InvalidArgument);
    a = AdmmParams{};
    a.max_iters = 0;
    EXPECT_THROW(a.validate(), InvalidArgument);
    a = AdmmParams{};
    a.change_tol = -1.0;
    EXPECT_THROW(a.validate(), InvalidArgument);
}

TEST(Admm, ReachesOracleObjective) {
    std::mt19937_64 rng(33);
    const auto p = random_problem(rng, {16, 16}, {8, 8}, 2, 0.01);
    const double want = masked_objective_enumerated(p, masked_spatial_oracle(p));
    const AdmmResult r = cflb_admm_train(p, AdmmParams{});
    EXPECT_LE(r.state.iter, 20);
    EXPECT_LE((masked_objective_enumerated(p, r.model.h) - want) / want, 1e-3);
}

TEST(Admm, ConvergesToOracleFilter) {
    std::mt19937_64 rng(34);
    const auto p = random_problem(rng, {12, 12}, {6, 6}, 3, 0.1);
    AdmmParams a;
    a.max_iters = 5000;
    a.rel_tol = 1e-12;
    a.change_tol = 1e-12;
    const AdmmResult r = cflb_admm_train(p, a);
    EXPECT_TRUE(r.state.converged);
    EXPECT_LT(rel_err(r.model.h, masked_spatial_oracle(p)), 1e-8);
}

TEST(Admm, IdentityMaskReducesToMosse) {
    std::mt19937_64 rng(35);
    auto p = random_problem(rng, {10, 10}, {10, 10}, 2, 0.05);
    p.mask = MaskSpec::identity({10, 10});
    AdmmParams a;
    a.max_iters = 20000;
    a.rel_tol = 1e-13;
    a.change_tol = 1e-13;
    const AdmmResult r = cflb_admm_train(p, a);
    EXPECT_LT(rel_err(r.model.h, mosse_train(p.xs, p.ys, p.lambda).h), 1e-4);
}

TEST(Admm, WarmStartAtFixedPointStaysPut) {
    std::mt19937_64 rng(36);
    const auto p = random_problem(rng, {12, 12}, {6, 6}, 2, 0.1);
    AdmmParams a;
    a.max_iters = 5000;
    a.rel_tol = 1e-13;
    a.change_tol = 1e-13;
    const AdmmResult first = cflb_admm_train(p, a);
    a.max_iters = 4;
    a.rel_tol = 0.0;
    a.change_tol.reset();
    const AdmmResult again = cflb_admm_solve(first.model.energies, p.mask, p.lambda, a, &first.state);
    EXPECT_LT(rel_err(again.model.h, first.model.h), 1e-8);
}

TEST(Admm, ZeroEnergyIsDegenerate) {
    RegularizedProblem p;
    p.mask = MaskSpec::centered({8, 8}, {4, 4});
    p.xs = {Signal2D(8, 8)};
    p.ys = {anchored_response(p.mask, {4, 4}, 1.0)};
    EXPECT_THROW(cflb_admm_train(p, AdmmParams{}), DegenerateInput);
}

TEST(GradientDescent, DecreasesAndApproachesOracle) {
    std::mt19937_64 rng(40);
    const auto p = random_problem(rng, {10, 10}, {5, 5}, 2, 0.1);
    const auto r = gradient_descent_train(p, gradient_descent_safe_step(p), 3000);
    for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1] + 1e-9 * r.trace[0]);
    const double want = masked_objective_enumerated(p, masked_spatial_oracle(p));
    EXPECT_LT((r.trace.back() - want) / want, 1e-3);
}

TEST(GradientDescent, LargeStepDiverges) {
    std::mt19937_64 rng(41);
    const auto p = random_problem(rng, {10, 10}, {5, 5}, 2, 0.1);
    try {
        gradient_descent_train(p, 50.0 * gradient_descent_safe_step(p), 200);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_FALSE(e.trace().empty());
    }
    EXPECT_THROW(gradient_descent_train(p, -1.0, 10), InvalidArgument);
}

TEST(ClosedForm, EnergyOracleMatchesEnumeratedOracle) {
    std::mt19937_64 rng(40);
    for (const auto& [outer, inner] : {std::pair<Shape, Shape>{{10, 9}, {4, 5}}, {{12, 12}, {12, 12}}, {{8, 11}, {3, 2}}}) {
        const auto p = random_problem(rng, outer, inner, 3, 0.07);
        const SpectralEnergies e = spectral_energies(p.xs, p.ys);
        EXPECT_LT(rel_err(masked_oracle_from_energies(e, p.mask, p.lambda), masked_spatial_oracle(p)), 1e-10);
    }
    const auto p = random_problem(rng, {6, 6}, {3, 3}, 1, 0.1);
    const SpectralEnergies e = spectral_energies(p.xs, p.ys);
    EXPECT_THROW(masked_oracle_from_energies(e, MaskSpec::centered({6, 7}, {3, 3}), 0.1), InvalidArgument);
    EXPECT_THROW(masked_oracle_from_energies(e, p.mask, 0.0), InvalidArgument);
}

TEST(Admm, StationaryStateAtTheMinimiserIsAFixedPoint) {
    std::mt19937_64 rng(41);
    const auto p = random_problem(rng, {16, 16}, {8, 8}, 2, 0.01);
    const SpectralEnergies e = spectral_energies(p.xs, p.ys);
    const Signal2D h = masked_oracle_from_energies(e, p.mask, p.lambda);
    const AdmmState start = admm_stationary_state(e, p.mask, h, 2.0);
    AdmmParams a;
    a.rel_tol = 0.0;
    a.max_iters = 50;
    const AdmmResult r = cflb_admm_solve(e, p.mask, p.lambda, a, &start);
    EXPECT_LT(rel_err(r.model.h, h), 1e-10);

    // Any other filter moves.
    Signal2D off = h;
    off.samples()[0] += 0.1;
    const AdmmState perturbed = admm_stationary_state(e, p.mask, off, 2.0);
    const AdmmResult moved = cflb_admm_solve(e, p.mask, p.lambda, a, &perturbed);
    EXPECT_LT(rel_err(moved.model.h, h), rel_err(off, h));
}
