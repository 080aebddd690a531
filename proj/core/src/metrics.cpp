#include "pame/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "pame/errors.hpp"

namespace pame::metrics {

std::vector<double> make_grid(double length, double step) {
    if (!(std::isfinite(step) && step > 0.0)) throw InvalidArgument("grid_step must be > 0");
    if (!(std::isfinite(length) && length > 0.0)) throw InvalidArgument("grid length must be > 0");
    const auto intervals = static_cast<std::size_t>(std::floor(length / step + 1e-9));
    std::vector<double> grid;
    grid.reserve(intervals + 2);
    for (std::size_t k = 0; k <= intervals; ++k) {
        grid.push_back(std::min(static_cast<double>(k) * step, length));
    }
    if (length - grid.back() > 1e-9 * length) grid.push_back(length);
    grid.back() = length;
    return grid;
}

std::vector<double> truth_on_grid(const env::WorldView& world, std::span<const double> grid) {
    std::vector<double> truth;
    truth.reserve(grid.size());
    for (const double x : grid) truth.push_back(world.pam(x));
    return truth;
}

double rmse_on_grid(std::span<const double> estimate, std::span<const double> truth) {
    if (estimate.size() != truth.size() || estimate.empty()) {
        throw InvalidArgument("rmse: estimate and truth must be non-empty and equally long");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = std::clamp(estimate[i], 0.0, 1.0) - truth[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(truth.size()));
}

double rmse(const gp::GpModel& model, const env::WorldView& world, double grid_step) {
    const std::vector<double> grid = make_grid(world.road.length, grid_step);
    const gp::PosteriorSummary post = gp::posterior(model, grid);
    return rmse_on_grid(post.mean, truth_on_grid(world, grid));
}

} // namespace pame::metrics
