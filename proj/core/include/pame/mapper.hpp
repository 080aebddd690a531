#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pame/environment.hpp"
#include "pame/gp.hpp"
#include "pame/metrics.hpp"
#include "pame/rng.hpp"
#include "pame/sampling.hpp"
#include "pame/sensing.hpp"

namespace pame::mapper {

/// Training set of the online map, in insertion order.
struct Dataset {
    std::vector<sensing::Measurement> entries;

    [[nodiscard]] std::size_t size() const { return entries.size(); }
    [[nodiscard]] bool empty() const { return entries.empty(); }
    [[nodiscard]] std::vector<double> positions() const;
    [[nodiscard]] std::vector<double> labels() const;
};

/// Everything an episode needs besides its seed.
struct SimParams {
    env::RoadConfig road;
    sensing::NoiseConfig noise;
    int max_sources = 10;
    /// Fixed starting point of every episode; also defines RMSE₀.
    gp::GpHyperparams initial_hyper{500.0, 0.25, 9e-4};
    gp::SearchOptions search;
    double grid_step = 10.0;

    void validate() const;
};

struct SimState {
    double position = 0.0;   // s_t
    double clock = 0.0;      // t
    std::size_t iteration = 0;
    Dataset dataset;
    gp::GpHyperparams hyper;
    gp::GpModel model;
    env::TrafficDensity traffic;
    env::SlotLayout layout;
    sampling::Strategy strategy = sampling::Strategy::uncertainty;
    bool time_varying = false;

    [[nodiscard]] env::WorldView world(const env::RoadConfig& road) const {
        return {road, layout, traffic};
    }
};

struct StepOutcome {
    std::size_t evicted = 0;
    std::size_t candidates = 0;
    std::size_t added = 0;
    int likelihood_evaluations = 0;
    double fit_predict_seconds = 0.0;
    /// Posterior mean on the prediction grid passed to step(); empty if none.
    std::vector<double> grid_mean;
};

struct StepResult {
    SimState state;
    StepOutcome outcome;
};

/// Entries whose stored traffic tag no longer matches the current density.
std::vector<std::size_t> detect_obsolete(const Dataset& dataset, const env::TrafficDensity& traffic);

/// World and prior model at t = 0, s = 0.
SimState initial_state(const SimParams& params, sampling::Strategy strategy,
                       const RngStreams& streams, bool time_varying);

/// One pass of the online loop: refresh traffic, evict obsolete data, measure,
/// gather external readings, select, refit, predict on `grid`, move.
///
/// Throws NumericalError if the refit fails; `state` is never modified.
StepResult step(const SimState& state, const RngStreams& streams, const SimParams& params,
                std::span<const double> grid = {});

struct EpisodeResult {
    double rmse0 = 0.0;
    std::vector<metrics::MetricsRecord> records;
};

/// Steps until the platform reaches the end of the road.
EpisodeResult run_episode(SimState state, const RngStreams& streams, const SimParams& params);

EpisodeResult run_episode(const SimParams& params, sampling::Strategy strategy, std::uint64_t seed,
                          bool time_varying);

} // namespace pame::mapper
