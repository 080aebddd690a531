#include "pame/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "pame/errors.hpp"

namespace pame::sampling {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::uncertainty: return "uncertainty";
    case Strategy::random: return "random";
    case Strategy::take_all: return "take_all";
    case Strategy::platform_only: return "platform_only";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    if (name == "uncertainty" || name == "proposed") return Strategy::uncertainty;
    if (name == "random" || name == "rnd") return Strategy::random;
    if (name == "take_all" || name == "nosel") return Strategy::take_all;
    if (name == "platform_only" || name == "nocom") return Strategy::platform_only;
    return std::nullopt;
}

double acquisition(const gp::GpModel& model, double x) {
    const double xs[] = {x};
    return acquisition(model, xs).front();
}

std::vector<double> acquisition(const gp::GpModel& model, std::span<const double> xs) {
    gp::PosteriorSummary post = gp::posterior(model, xs);
    for (double& v : post.variance) v = std::sqrt(v);
    return std::move(post.variance);
}

std::size_t most_uncertain(const gp::GpModel& model,
                           std::span<const sensing::Measurement> candidates) {
    if (candidates.empty()) throw InvalidArgument("select: empty candidate set");
    std::vector<double> xs;
    xs.reserve(candidates.size());
    for (const auto& c : candidates) xs.push_back(c.position);
    const std::vector<double> score = acquisition(model, xs);
    // max_element returns the first maximum.
    return static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
}

std::vector<sensing::Measurement> select(const gp::GpModel& model,
                                         std::span<const sensing::Measurement> candidates,
                                         Strategy strategy, Rng& rng) {
    if (candidates.empty()) throw InvalidArgument("select: empty candidate set");
    switch (strategy) {
    case Strategy::uncertainty:
        return {candidates[most_uncertain(model, candidates)]};
    case Strategy::random: {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        return {candidates[pick(rng)]};
    }
    case Strategy::take_all:
        return {candidates.begin(), candidates.end()};
    case Strategy::platform_only: {
        const auto it = std::find_if(candidates.begin(), candidates.end(), [](const auto& m) {
            return m.origin == sensing::Origin::platform;
        });
        return {it != candidates.end() ? *it : candidates.front()};
    }
    }
    throw InvalidArgument("select: unknown strategy");
}

} // namespace pame::sampling
