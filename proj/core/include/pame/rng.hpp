#pragma once

#include <cstdint>
#include <random>

namespace pame {

using Rng = std::mt19937_64;

/// Independent random streams of one simulation episode.
///
/// Every consumer draws from its own stream, re-derived per iteration, so two
/// episodes with the same seed see identical worlds and measurement noise even
/// when they consume different amounts of randomness (paired baselines).
enum class Stream : std::uint32_t {
    layout = 1,
    traffic_init = 2,
    traffic_evolve = 3,
    platform_noise = 4,
    sources = 5,
    selection = 6,
};

class RngStreams {
public:
    explicit RngStreams(std::uint64_t seed) : seed_(seed) {}

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    [[nodiscard]] Rng stream(Stream which, std::uint64_t index = 0) const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed_),
                          static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(which),
                          static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32)};
        return Rng(seq);
    }

private:
    std::uint64_t seed_;
};

} // namespace pame
