#include "pame/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "pame/errors.hpp"

namespace pame::harness {

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
        i = j + 1;
    }
    return rank;
}

const Run* find_run(std::span<const Run> runs, int test_id, Strategy s) {
    for (const Run& r : runs) {
        if (r.test_id == test_id && r.strategy == s) return &r;
    }
    return nullptr;
}

std::vector<int> test_ids(std::span<const Run> runs) {
    std::vector<int> ids;
    for (const Run& r : runs) ids.push_back(r.test_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

CurvePoint aggregate(std::size_t iteration, std::vector<double> values) {
    CurvePoint p;
    p.iteration = iteration;
    p.count = values.size();
    p.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    p.p16 = percentile(values, 0.16);
    p.median = percentile(values, 0.5);
    p.p84 = percentile(std::move(values), 0.84);
    return p;
}

} // namespace

std::vector<std::optional<double>> processing_ratio(std::span<const MetricsRecord> proposed,
                                                    std::span<const MetricsRecord> nosel) {
    const std::size_t n = std::min(proposed.size(), nosel.size());
    std::vector<std::optional<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double den = nosel[i].fit_predict_seconds;
        if (den > 0.0 && std::isfinite(den)) out[i] = proposed[i].fit_predict_seconds / den;
    }
    return out;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidArgument("percentile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("percentile level must lie in [0,1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidArgument("spearman: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

void McOptions::validate() const {
    params.validate();
    if (n_tests < 1) throw InvalidArgument("n_tests must be >= 1");
    if (strategies.empty()) throw InvalidArgument("strategies must not be empty");
}

std::vector<Run> run_monte_carlo(const McOptions& options) {
    options.validate();
    const auto n = static_cast<std::size_t>(options.n_tests);
    std::vector<std::vector<Run>> per_test(n);

    const auto run_test = [&](std::size_t i) {
        const std::uint64_t seed = options.base_seed + i;
        for (const Strategy s : options.strategies) {
            per_test[i].push_back(
                {static_cast<int>(i), seed, s,
                 mapper::run_episode(options.params, s, seed, options.time_varying)});
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) run_test(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        run_test(i);
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        pool.clear();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<Run> runs;
    for (auto& t : per_test) {
        for (auto& r : t) runs.push_back(std::move(r));
    }
    return runs;
}

std::vector<TimeRatioSample> paired_time_ratios(std::span<const Run> runs, Strategy proposed,
                                                Strategy nosel) {
    std::vector<TimeRatioSample> out;
    for (const int id : test_ids(runs)) {
        const Run* p = find_run(runs, id, proposed);
        const Run* q = find_run(runs, id, nosel);
        if (p == nullptr || q == nullptr) continue;
        const auto ratios = processing_ratio(p->episode.records, q->episode.records);
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            out.push_back({id, p->episode.records[i].iteration, ratios[i],
                           p->episode.records[i].dataset_size, q->episode.records[i].dataset_size});
        }
    }
    return out;
}

WinRate win_rate(std::span<const Run> runs, Strategy strategy, Strategy baseline) {
    WinRate w{strategy, baseline, 0.0, 0.0, 0};
    double total = 0.0;
    std::vector<double> per_run;
    for (const int id : test_ids(runs)) {
        const Run* a = find_run(runs, id, strategy);
        const Run* b = find_run(runs, id, baseline);
        if (a == nullptr || b == nullptr) continue;
        const auto& ra = a->episode.records;
        const auto& rb = b->episode.records;
        const std::size_t n = std::min(ra.size(), rb.size());
        if (n == 0) continue;
        double score = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (ra[i].learning_ratio < rb[i].learning_ratio) {
                score += 1.0;
            } else if (ra[i].learning_ratio == rb[i].learning_ratio) {
                score += 0.5;
            }
        }
        total += score;
        w.comparisons += n;
        per_run.push_back(score / static_cast<double>(n));
    }
    if (w.comparisons > 0) {
        w.pooled = total / static_cast<double>(w.comparisons);
        w.per_run_median = percentile(per_run, 0.5);
    }
    return w;
}

McSummary summarize(std::span<const Run> runs, std::span<const Strategy> strategies) {
    McSummary summary;
    for (const Strategy s : strategies) {
        std::map<std::size_t, std::vector<double>> by_iteration;
        for (const Run& r : runs) {
            if (r.strategy != s) continue;
            for (const auto& rec : r.episode.records) {
                by_iteration[rec.iteration].push_back(rec.learning_ratio);
            }
        }
        StrategyCurve curve{s, {}};
        for (auto& [it, values] : by_iteration) curve.points.push_back(aggregate(it, std::move(values)));
        summary.learning.push_back(std::move(curve));
    }
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        for (std::size_t j = 0; j < strategies.size(); ++j) {
            if (i != j) summary.wins.push_back(win_rate(runs, strategies[i], strategies[j]));
        }
    }

    const bool paired =
        std::find(strategies.begin(), strategies.end(), Strategy::uncertainty) != strategies.end() &&
        std::find(strategies.begin(), strategies.end(), Strategy::take_all) != strategies.end();
    if (paired) {
        std::map<std::size_t, std::vector<double>> by_iteration;
        std::vector<double> its, taus;
        for (const auto& t : paired_time_ratios(runs, Strategy::uncertainty, Strategy::take_all)) {
            if (!t.ratio) continue;
            by_iteration[t.iteration].push_back(*t.ratio);
            if (t.nosel_size <= 2 * t.proposed_size) continue;
            its.push_back(static_cast<double>(t.iteration));
            taus.push_back(*t.ratio);
        }
        for (auto& [it, values] : by_iteration) {
            summary.time_ratio.push_back(aggregate(it, std::move(values)));
        }
        if (!taus.empty()) {
            summary.time_ratio_median = percentile(taus, 0.5);
            summary.time_ratio_below_one =
                static_cast<double>(std::count_if(taus.begin(), taus.end(),
                                                  [](double v) { return v < 1.0; })) /
                static_cast<double>(taus.size());
            summary.time_ratio_trend = spearman(its, taus);
        }
    }
    return summary;
}

McResult monte_carlo(const McOptions& options) {
    McResult result;
    result.runs = run_monte_carlo(options);
    result.summary = summarize(result.runs, options.strategies);
    return result;
}

} // namespace pame::harness
