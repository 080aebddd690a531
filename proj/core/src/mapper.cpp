#include "pame/mapper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "pame/errors.hpp"

namespace pame::mapper {

namespace {

constexpr double kTagTolerance = 1e-9;

// Guards against a zero-length stride; v(μ) > 0 on [0,1] so this never binds.
constexpr std::size_t kMaxIterations = 1'000'000;

} // namespace

std::vector<double> Dataset::positions() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.position);
    return out;
}

std::vector<double> Dataset::labels() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.value);
    return out;
}

void SimParams::validate() const {
    road.validate();
    noise.validate();
    initial_hyper.validate();
    if (max_sources < 0) throw InvalidArgument("max_sources must be >= 0");
    if (!(std::isfinite(grid_step) && grid_step > 0.0)) throw InvalidArgument("grid_step must be > 0");
    if (search.max_evaluations < 1) throw InvalidArgument("max_evaluations must be >= 1");
}

std::vector<std::size_t> detect_obsolete(const Dataset& dataset, const env::TrafficDensity& traffic) {
    std::vector<std::size_t> stale;
    for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
        const auto& e = dataset.entries[i];
        if (std::abs(env::traffic_at(traffic, e.position) - e.traffic_tag) > kTagTolerance) {
            stale.push_back(i);
        }
    }
    return stale;
}

SimState initial_state(const SimParams& params, sampling::Strategy strategy,
                       const RngStreams& streams, bool time_varying) {
    params.validate();
    SimState s;
    Rng layout_rng = streams.stream(Stream::layout);
    Rng traffic_rng = streams.stream(Stream::traffic_init);
    s.layout = env::generate_layout(layout_rng, params.road);
    s.traffic = env::generate_traffic(traffic_rng, params.road);
    s.hyper = params.initial_hyper;
    s.model = gp::GpModel(params.initial_hyper);
    s.strategy = strategy;
    s.time_varying = time_varying;
    return s;
}

StepResult step(const SimState& state, const RngStreams& streams, const SimParams& params,
                std::span<const double> grid) {
    if (!(state.position >= 0.0 && state.position <= params.road.length)) {
        throw InvalidArgument("step: platform position " + std::to_string(state.position) +
                              " is off the road");
    }
    const std::uint64_t k = state.iteration;
    StepResult result{state, {}};
    SimState& next = result.state;
    StepOutcome& out = result.outcome;

    if (state.time_varying) {
        Rng rng = streams.stream(Stream::traffic_evolve, k);
        next.traffic = env::evolve_traffic(state.traffic, rng, params.road);
    }

    const std::vector<std::size_t> stale = detect_obsolete(next.dataset, next.traffic);
    out.evicted = stale.size();
    if (!stale.empty()) {
        std::vector<sensing::Measurement> kept;
        kept.reserve(next.dataset.size() - stale.size());
        std::size_t s = 0;
        for (std::size_t i = 0; i < next.dataset.entries.size(); ++i) {
            if (s < stale.size() && stale[s] == i) {
                ++s;
                continue;
            }
            kept.push_back(next.dataset.entries[i]);
        }
        next.dataset.entries = std::move(kept);
    }

    const env::WorldView world = next.world(params.road);
    sampling::CandidateSet candidates;
    {
        Rng rng = streams.stream(Stream::platform_noise, k);
        candidates.push_back(sensing::observe(next.position, world, rng, params.noise, next.clock,
                                              sensing::Origin::platform));
    }
    if (next.strategy != sampling::Strategy::platform_only) {
        Rng rng = streams.stream(Stream::sources, k);
        auto sources =
            sensing::generate_sources(rng, world, params.noise, next.clock, params.max_sources);
        candidates.insert(candidates.end(), sources.begin(), sources.end());
    }
    out.candidates = candidates.size();

    const auto started = std::chrono::steady_clock::now();
    try {
        // Acquisition reads the model of the pruned dataset so that evicted
        // regions look uncertain again.
        gp::GpModel current = state.model;
        if (next.strategy == sampling::Strategy::uncertainty && !stale.empty()) {
            const auto xs = next.dataset.positions();
            const auto ys = next.dataset.labels();
            current = gp::fit(xs, ys, state.hyper, params.search.fit);
        }
        Rng rng = streams.stream(Stream::selection, k);
        const auto chosen = sampling::select(current, candidates, next.strategy, rng);
        next.dataset.entries.insert(next.dataset.entries.end(), chosen.begin(), chosen.end());
        out.added = chosen.size();

        const auto xs = next.dataset.positions();
        const auto ys = next.dataset.labels();
        gp::SearchOptions search = params.search;
        search.extra_starts.push_back(params.initial_hyper);
        const gp::SearchResult found = gp::search_hyperparameters(xs, ys, state.hyper, search);
        out.likelihood_evaluations = found.evaluations;
        next.hyper = found.hyper;
        next.model = gp::fit(xs, ys, next.hyper, params.search.fit);
        if (!grid.empty()) out.grid_mean = gp::posterior(next.model, grid).mean;
    } catch (const NumericalError& e) {
        throw NumericalError("iteration " + std::to_string(k + 1) + " at s = " +
                             std::to_string(state.position) + " m with " +
                             std::to_string(next.dataset.size()) + " points: " + e.what());
    }
    out.fit_predict_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    next.position += env::velocity(env::traffic_at(next.traffic, state.position)) *
                     params.road.sample_period;
    next.clock += params.road.sample_period;
    next.iteration = k + 1;
    return result;
}

EpisodeResult run_episode(SimState state, const RngStreams& streams, const SimParams& params) {
    params.validate();
    const std::vector<double> grid = metrics::make_grid(params.road.length, params.grid_step);

    EpisodeResult episode;
    {
        const auto truth = metrics::truth_on_grid(state.world(params.road), grid);
        episode.rmse0 = metrics::rmse_on_grid(gp::posterior(state.model, grid).mean, truth);
    }

    while (state.position < params.road.length && state.iteration < kMaxIterations) {
        const double measured_at = state.position;
        StepResult r = step(state, streams, params, grid);
        state = std::move(r.state);

        metrics::MetricsRecord rec;
        rec.iteration = state.iteration;
        rec.clock = state.clock;
        rec.position = measured_at;
        const auto truth = metrics::truth_on_grid(state.world(params.road), grid);
        rec.rmse = metrics::rmse_on_grid(r.outcome.grid_mean, truth);
        rec.learning_ratio = episode.rmse0 > 0.0 ? rec.rmse / episode.rmse0 : 0.0;
        rec.fit_predict_seconds = r.outcome.fit_predict_seconds;
        rec.dataset_size = state.dataset.size();
        rec.traffic_version = state.traffic.version;
        rec.evicted = r.outcome.evicted;
        episode.records.push_back(rec);
    }
    return episode;
}

EpisodeResult run_episode(const SimParams& params, sampling::Strategy strategy, std::uint64_t seed,
                          bool time_varying) {
    const RngStreams streams(seed);
    return run_episode(initial_state(params, strategy, streams, time_varying), streams, params);
}

} // namespace pame::mapper
