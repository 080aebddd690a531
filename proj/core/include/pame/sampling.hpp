#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pame/gp.hpp"
#include "pame/rng.hpp"
#include "pame/sensing.hpp"

namespace pame::sampling {

/// uncertainty is the proposed policy; the rest are the comparison baselines.
enum class Strategy {
    uncertainty,     // keep the single most uncertain candidate
    random,          // Rnd: keep one candidate chosen uniformly
    take_all,        // NoSel: keep every candidate
    platform_only,   // NoCom: keep the onboard reading, no external sources
};

std::string_view to_string(Strategy s);
/// Accepts canonical names and the baseline aliases proposed/rnd/nosel/nocom.
std::optional<Strategy> parse_strategy(std::string_view name);

/// Platform measurement first, then external sources in arrival order.
using CandidateSet = std::vector<sensing::Measurement>;

/// Latent posterior standard deviation at x.
double acquisition(const gp::GpModel& model, double x);
std::vector<double> acquisition(const gp::GpModel& model, std::span<const double> xs);

/// Index of the largest acquisition value; ties go to the earliest candidate.
std::size_t most_uncertain(const gp::GpModel& model, std::span<const sensing::Measurement> candidates);

/// Subset of `candidates` retained under `strategy`. Only random consumes `rng`.
std::vector<sensing::Measurement> select(const gp::GpModel& model,
                                         std::span<const sensing::Measurement> candidates,
                                         Strategy strategy, Rng& rng);

} // namespace pame::sampling
