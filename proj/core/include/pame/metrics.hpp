#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pame/environment.hpp"
#include "pame/gp.hpp"

namespace pame::metrics {

/// One iteration of an episode as seen by the experiment harness.
struct MetricsRecord {
    std::size_t iteration = 0;          // 1-based; iteration 0 is the prior model
    double clock = 0.0;                 // s, after the iteration
    double position = 0.0;              // m, platform position where it measured
    double rmse = 0.0;
    double learning_ratio = 0.0;        // rmse / rmse₀
    double fit_predict_seconds = 0.0;   // wall clock
    std::size_t dataset_size = 0;
    std::uint64_t traffic_version = 0;
    std::size_t evicted = 0;
};

/// 0, Δ, 2Δ, … up to `length`; `length` itself is always the last point.
std::vector<double> make_grid(double length, double step);

std::vector<double> truth_on_grid(const env::WorldView& world, std::span<const double> grid);

/// Root mean square of (clamp(estimate, 0, 1) − truth) over the grid.
double rmse_on_grid(std::span<const double> estimate, std::span<const double> truth);

/// Grid discretization of the road-averaged squared error of the posterior mean.
double rmse(const gp::GpModel& model, const env::WorldView& world, double grid_step);

} // namespace pame::metrics
