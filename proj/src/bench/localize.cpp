#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cflb/bench.hpp"
#include "cflb/detect.hpp"
#include "cflb/error.hpp"
#include "parallel.hpp"

namespace cflb::bench {
namespace {

struct Split {
    std::vector<synth::LocalizationSample> train;
    std::vector<synth::LocalizationSample> test;
};

std::vector<Split> make_splits(const LocalizeConfig& c) {
    const int max_n = *std::max_element(c.train_sizes.begin(), c.train_sizes.end());
    const int need = max_n + c.test_count;
    std::vector<Split> out;
    std::vector<synth::LocalizationSample> disk;
    if (c.data_dir) {
        disk = synth::read_localization_set(*c.data_dir);
        if (static_cast<int>(disk.size()) < need) {
            throw InvalidArgument("localize: dataset has " + std::to_string(disk.size()) + " images, need " +
                                  std::to_string(need));
        }
    }
    for (int run = 0; run < c.runs; ++run) {
        Split s;
        if (c.data_dir) {
            std::vector<std::size_t> idx(disk.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::mt19937_64 rng(c.suite.seed + static_cast<std::uint64_t>(run));
            std::shuffle(idx.begin(), idx.end(), rng);
            for (int k = 0; k < need; ++k) (k < max_n ? s.train : s.test).push_back(disk[idx[k]]);
        } else {
            auto params = c.suite;
            params.seed = c.suite.seed + static_cast<std::uint64_t>(run);
            auto all = synth::localization_set(params, need);
            s.train.assign(all.begin(), all.begin() + max_n);
            s.test.assign(all.begin() + max_n, all.end());
        }
        for (const auto* part : {&s.train, &s.test}) {
            for (const auto& sample : *part) {
                if (sample.image.height() < c.filter_size || sample.image.width() < c.filter_size) {
                    throw InvalidArgument("localize: image smaller than the filter");
                }
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

LocalizeCell run_cell(const LocalizeConfig& c, const Split& split, int run, double ratio, int n) {
    LocalizeCell cell;
    cell.run = run;
    cell.ratio = ratio;
    cell.train_size = n;
    const int d = c.filter_size;
    const int t = static_cast<int>(std::lround(ratio * d));
    cell.window = t;
    const MaskSpec mask = MaskSpec::centered({t, t}, {d, d});
    std::vector<Signal2D> xs;
    std::vector<Signal2D> ys;
    const Signal2D y = anchored_response(mask, {t / 2, t / 2}, c.sigma);
    for (int i = 0; i < n; ++i) {
        xs.push_back(preprocess_or_zero(extract_window(split.train[i].image, split.train[i].target, {t, t})));
        ys.push_back(y);
    }
    Signal2D h;
    if (t == d) {
        cell.solver = "mosse";
        h = mosse_train(xs, ys, c.lambda).h;
    } else {
        cell.solver = "cflb";
        h = cflb_admm_train({xs, ys, c.lambda, mask}, c.admm).model.h;
    }
    for (const auto& sample : split.test) {
        const MaskSpec embed = MaskSpec::centered(sample.image.shape(), {d, d});
        const ResponseMap r = correlate(h, embed, power_normalize(sample.image));
        cell.distances.push_back(normalized_distance(locate(r, embed), sample.target, sample.reference));
    }
    return cell;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stdev(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

void LocalizeConfig::validate() const {
    if (filter_size < 4) throw InvalidArgument("localize: filter-size must be >= 4");
    if (ratios.empty() || train_sizes.empty()) throw InvalidArgument("localize: ratios and train-sizes must be non-empty");
    for (double r : ratios) {
        if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidArgument("localize: ratios must be >= 1");
    }
    for (int n : train_sizes) {
        if (n < 1) throw InvalidArgument("localize: train-sizes must be positive");
    }
    auto distinct = [](auto v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    if (!distinct(ratios) || !distinct(train_sizes)) throw InvalidArgument("localize: ratios and train-sizes must be distinct");
    if (test_count < 1 || runs < 1 || threads < 1) throw InvalidArgument("localize: test-count, runs and threads must be positive");
    if (!(lambda > 0.0) || !(sigma > 0.0)) throw InvalidArgument("localize: lambda and sigma must be positive");
    if (thresholds.empty()) throw InvalidArgument("localize: thresholds must be non-empty");
    for (double t : thresholds) {
        if (!(t > 0.0)) throw InvalidArgument("localize: thresholds must be positive");
    }
    if (!(report_threshold > 0.0)) throw InvalidArgument("localize: report-threshold must be positive");
    if (suite.distractor_contrast < 0.0 || suite.clutter < 0.0 || suite.noise < 0.0 || suite.distractors < 0) {
        throw InvalidArgument("localize: suite contrasts, clutter, noise and distractor count must be >= 0");
    }
    admm.validate();
}

double success_rate(const std::vector<double>& distances, double threshold) {
    if (distances.empty()) throw InvalidArgument("success_rate: no distances");
    const auto ok = std::count_if(distances.begin(), distances.end(), [&](double d) { return d <= threshold; });
    return static_cast<double>(ok) / static_cast<double>(distances.size());
}

Report localize_bench(const LocalizeConfig& c) {
    c.validate();
    const auto splits = make_splits(c);

    struct Key {
        int run;
        double ratio;
        int n;
    };
    std::vector<Key> keys;
    for (int run = 0; run < c.runs; ++run) {
        for (double r : c.ratios) {
            for (int n : c.train_sizes) keys.push_back({run, r, n});
        }
    }
    std::vector<LocalizeCell> cells(keys.size());
    detail::parallel_for(static_cast<int>(keys.size()), c.threads, [&](int i) {
        const Key& k = keys[static_cast<std::size_t>(i)];
        cells[static_cast<std::size_t>(i)] = run_cell(c, splits[static_cast<std::size_t>(k.run)], k.run, k.ratio, k.n);
    });

    Report rep;
    rep.command = "localize-bench";
    json raw_cells = json::array();
    for (const auto& cell : cells) {
        raw_cells.push_back({{"run", cell.run},
                             {"ratio", cell.ratio},
                             {"window", cell.window},
                             {"train_size", cell.train_size},
                             {"solver", cell.solver},
                             {"distances", cell.distances}});
    }
    rep.raw["cells"] = raw_cells;

    // Rates per (ratio, N) across runs, in cell order.
    auto rates = [&](double ratio, int n, double threshold) {
        std::vector<double> out;
        for (const auto& cell : cells) {
            if (cell.ratio == ratio && cell.train_size == n) out.push_back(success_rate(cell.distances, threshold));
        }
        return out;
    };
    auto window_of = [&](double ratio) { return static_cast<int>(std::lround(ratio * c.filter_size)); };

    Table by_threshold{"rate_vs_threshold", {"ratio", "window", "train_size", "threshold", "rate"}, {}};
    Table by_n{"rate_vs_train_size", {"ratio", "window", "train_size", "threshold", "rate", "rate_std"}, {}};
    for (double r : c.ratios) {
        for (int n : c.train_sizes) {
            for (double t : c.thresholds) by_threshold.rows.push_back({r, window_of(r), n, t, mean(rates(r, n, t))});
            const auto v = rates(r, n, c.report_threshold);
            by_n.rows.push_back({r, window_of(r), n, c.report_threshold, mean(v), stdev(v)});
        }
    }
    const int max_n = *std::max_element(c.train_sizes.begin(), c.train_sizes.end());
    Table by_ratio{"rate_vs_ratio", {"ratio", "window", "train_size", "threshold", "rate", "rate_std"}, {}};
    for (double r : c.ratios) {
        const auto v = rates(r, max_n, c.report_threshold);
        by_ratio.rows.push_back({r, window_of(r), max_n, c.report_threshold, mean(v), stdev(v)});
    }
    rep.tables = {by_threshold, by_n, by_ratio};
    return rep;
}

}  // namespace cflb::bench
