#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pame/mapper.hpp"
#include "pame/metrics.hpp"
#include "pame/sampling.hpp"

namespace pame::harness {

using metrics::MetricsRecord;
using sampling::Strategy;

/// Element-wise fit+predict time ratio over the common prefix of two series.
/// Entries with a non-positive denominator are nullopt.
std::vector<std::optional<double>> processing_ratio(std::span<const MetricsRecord> proposed,
                                                    std::span<const MetricsRecord> nosel);

/// Linear-interpolation percentile, q in [0,1]. `values` need not be sorted.
double percentile(std::vector<double> values, double q);

/// Spearman rank correlation with average ranks for ties; NaN if undefined.
double spearman(std::span<const double> x, std::span<const double> y);

struct McOptions {
    mapper::SimParams params;
    std::vector<Strategy> strategies;
    int n_tests = 10;
    bool time_varying = false;
    std::uint64_t base_seed = 1;
    /// Worker threads across tests; arms of one test always run sequentially.
    unsigned threads = 1;

    void validate() const;
};

/// One strategy arm of one Monte-Carlo test.
struct Run {
    int test_id = 0;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::uncertainty;
    mapper::EpisodeResult episode;
};

struct CurvePoint {
    std::size_t iteration = 0;
    std::size_t count = 0;   // tests that reached this iteration
    double mean = 0.0;
    double p16 = 0.0;
    double median = 0.0;
    double p84 = 0.0;
};

struct StrategyCurve {
    Strategy strategy = Strategy::uncertainty;
    std::vector<CurvePoint> points;
};

/// How often `strategy` has the smaller learning ratio than `baseline`.
/// A tie counts one half.
struct WinRate {
    Strategy strategy = Strategy::uncertainty;
    Strategy baseline = Strategy::uncertainty;
    double pooled = 0.0;           // over every (test, iteration) pair
    double per_run_median = 0.0;   // median over tests of the per-test rate
    std::size_t comparisons = 0;
};

struct TimeRatioSample {
    int test_id = 0;
    std::size_t iteration = 0;
    std::optional<double> ratio;
    std::size_t proposed_size = 0;
    std::size_t nosel_size = 0;
};

struct McSummary {
    std::vector<StrategyCurve> learning;
    std::vector<WinRate> wins;
    /// τ_t aggregated per iteration; empty unless both uncertainty and take_all ran.
    std::vector<CurvePoint> time_ratio;
    // The scalars below use only iterations where take_all holds more than
    // twice the proposed dataset.
    double time_ratio_median = 0.0;
    double time_ratio_below_one = 0.0;   // fraction of valid τ_t < 1
    double time_ratio_trend = 0.0;       // Spearman of τ_t vs iteration, pooled
};

/// Runs every (test, strategy) pair. Test i uses seed base_seed + i, shared by all arms.
std::vector<Run> run_monte_carlo(const McOptions& options);

/// Pooled τ_t samples of every test where both arms ran.
std::vector<TimeRatioSample> paired_time_ratios(std::span<const Run> runs, Strategy proposed,
                                                Strategy nosel);

/// Pairwise win rate of `strategy` over `baseline` on tests both ran.
WinRate win_rate(std::span<const Run> runs, Strategy strategy, Strategy baseline);

McSummary summarize(std::span<const Run> runs, std::span<const Strategy> strategies);

struct McResult {
    std::vector<Run> runs;
    McSummary summary;
};

McResult monte_carlo(const McOptions& options);

} // namespace pame::harness
