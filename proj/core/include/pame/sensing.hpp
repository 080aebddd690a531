#pragma once

#include <vector>

#include "pame/environment.hpp"
#include "pame/rng.hpp"

namespace pame::sensing {

enum class Origin { platform, external };

struct Measurement {
    double position = 0.0;      // m
    double value = 0.0;         // noisy PAM reading, not clamped
    double traffic_tag = 0.0;   // μ at position when collected
    double timestamp = 0.0;     // s
    Origin origin = Origin::platform;
};

enum class NoiseMode { gaussian, indicator };

struct NoiseConfig {
    double sigma = 3e-2;
    double p0 = 0.05;   // absent/occupied cell read as free
    double p1 = 0.05;   // free cell missed
    NoiseMode mode = NoiseMode::gaussian;

    void validate() const;

    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

/// true PAM plus N(0, σ²).
Measurement observe_gaussian(double x, const env::WorldView& world, Rng& rng,
                             const NoiseConfig& noise, double t, Origin origin = Origin::platform);

/// Per-cell detection model: free cells survive with probability 1 − p1,
/// every other cell in the window reads free with probability p0.
Measurement observe_indicator(double x, const env::WorldView& world, Rng& rng,
                              const NoiseConfig& noise, double t, Origin origin = Origin::platform);

/// Dispatches on noise.mode.
Measurement observe(double x, const env::WorldView& world, Rng& rng, const NoiseConfig& noise,
                    double t, Origin origin = Origin::platform);

/// N_t ~ U{0..max_sources} connected sources, each at a uniform position on the road.
std::vector<Measurement> generate_sources(Rng& rng, const env::WorldView& world,
                                          const NoiseConfig& noise, double t, int max_sources);

} // namespace pame::sensing
