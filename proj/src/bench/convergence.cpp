#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "cflb/bench.hpp"
#include "cflb/error.hpp"
#include "parallel.hpp"

namespace cflb::bench {
namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

MaskSpec mask_of(const ConvergenceConfig& c) {
    return MaskSpec::centered({c.window, c.window}, {c.filter, c.filter});
}

struct Cell {
    int n = 0;
    int instance = 0;
    double precompute_s = 0.0;
    double reference = 0.0;
    std::string reference_kind;
    std::vector<AdmmIteration> admm;
    std::vector<double> gd;
    double gd_step = 0.0;
    double gd_total_s = 0.0;
    bool gd_diverged = false;
};

double gap(double e, double ref) {
    return (e - ref) / std::abs(ref);
}

// 1-based index of the first entry satisfying pred, -1 if none.
template <typename Seq, typename Pred>
int first_index(const Seq& seq, Pred pred) {
    for (std::size_t k = 0; k < seq.size(); ++k) {
        if (pred(seq[k])) return static_cast<int>(k) + 1;
    }
    return -1;
}

Cell run_cell(const ConvergenceConfig& c, int n, int instance) {
    Cell cell;
    cell.n = n;
    cell.instance = instance;
    const RegularizedProblem p = convergence_instance(c, n, instance);

    auto t0 = clock_type::now();
    const SpectralEnergies e = spectral_energies(p.xs, p.ys);
    cell.precompute_s = seconds_since(t0);

    AdmmParams traced = c.admm;
    traced.rel_tol = 0.0;
    cell.admm = cflb_admm_solve(e, p.mask, p.lambda, traced).state.trace;

    if (p.mask.inner.count() <= c.oracle_max_elements) {
        cell.reference_kind = "oracle";
        cell.reference = masked_objective(e, p.mask, p.lambda, masked_spatial_oracle(p));
    } else {
        cell.reference_kind = "long_admm";
        AdmmParams longer = c.admm;
        longer.max_iters = c.reference_iters;
        longer.rel_tol = 1e-12;
        cell.reference = cflb_admm_solve(e, p.mask, p.lambda, longer).state.trace.back().objective;
    }

    cell.gd_step = c.gd_step > 0.0 ? c.gd_step : gradient_descent_safe_step(p);
    t0 = clock_type::now();
    try {
        cell.gd = gradient_descent_train(p, cell.gd_step, c.gd_iters).trace;
    } catch (const DivergenceError& err) {
        cell.gd = err.trace();
        cell.gd_diverged = true;
    }
    cell.gd_total_s = seconds_since(t0);
    return cell;
}

}  // namespace

void ConvergenceConfig::validate() const {
    if (filter < 1 || window < filter) throw InvalidArgument("convergence: need 1 <= filter <= window");
    if (sizes.empty()) throw InvalidArgument("convergence: sizes must be non-empty");
    for (int n : sizes) {
        if (n < 1) throw InvalidArgument("convergence: sizes must be positive");
    }
    if (instances < 1 || threads < 1) throw InvalidArgument("convergence: instances and threads must be positive");
    if (!(lambda > 0.0)) throw InvalidArgument("convergence: lambda must be positive");
    if (!(objective_tol > 0.0)) throw InvalidArgument("convergence: objective-tol must be positive");
    if (gd_iters < 1 || reference_iters < 1) throw InvalidArgument("convergence: gd-iters and reference-iters must be positive");
    if (gd_step < 0.0) throw InvalidArgument("convergence: gd-step must be >= 0");
    if (oracle_max_elements > kOracleMaxElements) {
        throw InvalidArgument("convergence: oracle-max-elements exceeds " + std::to_string(kOracleMaxElements));
    }
    admm.validate();
}

RegularizedProblem convergence_instance(const ConvergenceConfig& c, int n, int instance) {
    std::seed_seq seq{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32),
                      static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(instance)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<int> jitter(-1, 1);
    RegularizedProblem p;
    p.lambda = c.lambda;
    p.mask = mask_of(c);
    const double sigma = std::max(1.0, c.window / 16.0);
    for (int i = 0; i < n; ++i) {
        Signal2D x(c.window, c.window);
        for (auto& v : x.samples()) v = noise(rng);
        p.xs.push_back(preprocess(synth::gaussian_blur(x, 1.0)));
        p.ys.push_back(anchored_response(p.mask, {c.window / 2 + jitter(rng), c.window / 2 + jitter(rng)}, sigma));
    }
    return p;
}

Report convergence_bench(const ConvergenceConfig& c) {
    c.validate();
    std::vector<std::pair<int, int>> keys;
    for (int n : c.sizes) {
        for (int i = 0; i < c.instances; ++i) keys.emplace_back(n, i);
    }
    std::vector<Cell> cells(keys.size());
    detail::parallel_for(static_cast<int>(keys.size()), c.threads, [&](int k) {
        cells[static_cast<std::size_t>(k)] = run_cell(c, keys[static_cast<std::size_t>(k)].first,
                                                      keys[static_cast<std::size_t>(k)].second);
    });

    Report rep;
    rep.command = "convergence-bench";
    json raw = json::array();
    Table traces{"traces",
                 {"n", "instance", "iteration", "admm_objective", "admm_gap", "admm_relative_residual", "admm_mu",
                  "gd_objective", "gd_gap"},
                 {}};
    for (const auto& cell : cells) {
        json admm_obj = json::array(), admm_res = json::array(), admm_mu = json::array(), admm_s = json::array();
        for (const auto& it : cell.admm) {
            admm_obj.push_back(it.objective);
            admm_res.push_back(it.relative_residual);
            admm_mu.push_back(it.mu);
            admm_s.push_back(it.seconds);
        }
        raw.push_back({{"n", cell.n},
                       {"instance", cell.instance},
                       {"precompute_s", cell.precompute_s},
                       {"reference_objective", cell.reference},
                       {"reference_kind", cell.reference_kind},
                       {"admm_objective", admm_obj},
                       {"admm_relative_residual", admm_res},
                       {"admm_mu", admm_mu},
                       {"admm_iteration_s", admm_s},
                       {"gd_step", cell.gd_step},
                       {"gd_objective", cell.gd},
                       {"gd_total_s", cell.gd_total_s},
                       {"gd_diverged", cell.gd_diverged}});
        const std::size_t len = std::max(cell.admm.size(), cell.gd.size());
        for (std::size_t k = 0; k < len; ++k) {
            std::vector<json> row{cell.n, cell.instance, static_cast<int>(k) + 1};
            if (k < cell.admm.size()) {
                const auto& it = cell.admm[k];
                row.insert(row.end(), {it.objective, gap(it.objective, cell.reference), it.relative_residual, it.mu});
            } else {
                row.insert(row.end(), {nullptr, nullptr, nullptr, nullptr});
            }
            if (k < cell.gd.size()) {
                row.insert(row.end(), {cell.gd[k], gap(cell.gd[k], cell.reference)});
            } else {
                row.insert(row.end(), {nullptr, nullptr});
            }
            traces.rows.push_back(std::move(row));
        }
    }
    rep.raw["cells"] = raw;

    // Per N: timings averaged over instances, iteration counts and gaps at their
    // worst instance (-1 when some instance never reached the tolerance).
    Table summary{"summary",
                  {"n", "precompute_s", "admm_iteration_s", "gd_iteration_s", "admm_iters_to_objective_tol",
                   "admm_iters_to_rel_tol", "gd_iters_to_objective_tol", "admm_final_gap", "gd_final_gap",
                   "gd_diverged", "reference"},
                  {}};
    for (int n : c.sizes) {
        double pre = 0.0, admm_it = 0.0, gd_it = 0.0, admm_gap = -INFINITY, gd_gap = -INFINITY;
        int admm_tol = 0, admm_rel = 0, gd_tol = 0, diverged = 0, count = 0;
        std::string ref;
        auto worst = [](int acc, int v) { return (acc < 0 || v < 0) ? -1 : std::max(acc, v); };
        for (const auto& cell : cells) {
            if (cell.n != n) continue;
            ++count;
            pre += cell.precompute_s;
            double s = 0.0;
            for (const auto& it : cell.admm) s += it.seconds;
            admm_it += s / static_cast<double>(cell.admm.size());
            gd_it += cell.gd.empty() ? 0.0 : cell.gd_total_s / static_cast<double>(cell.gd.size());
            admm_tol = worst(admm_tol, first_index(cell.admm, [&](const AdmmIteration& it) {
                                 return gap(it.objective, cell.reference) <= c.objective_tol;
                             }));
            admm_rel = worst(admm_rel, first_index(cell.admm, [&](const AdmmIteration& it) {
                                 return it.relative_residual <= c.admm.rel_tol;
                             }));
            gd_tol = worst(gd_tol, first_index(cell.gd, [&](double v) { return gap(v, cell.reference) <= c.objective_tol; }));
            admm_gap = std::max(admm_gap, gap(cell.admm.back().objective, cell.reference));
            gd_gap = std::max(gd_gap, cell.gd.empty() ? INFINITY : gap(cell.gd.back(), cell.reference));
            diverged += cell.gd_diverged ? 1 : 0;
            ref = cell.reference_kind;
        }
        summary.rows.push_back({n, pre / count, admm_it / count, gd_it / count, admm_tol, admm_rel, gd_tol, admm_gap, gd_gap,
                                diverged, ref});
    }
    rep.tables = {summary, traces};
    return rep;
}

}  // namespace cflb::bench
