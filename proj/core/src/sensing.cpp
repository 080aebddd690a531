#include "pame/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pame/errors.hpp"

namespace pame::sensing {

namespace {

void require_on_road(double x, const env::RoadConfig& road) {
    if (!(x >= 0.0 && x <= road.length)) {
        throw InvalidArgument("observation position " + std::to_string(x) + " outside the road");
    }
}

} // namespace

void NoiseConfig::validate() const {
    if (!(std::isfinite(sigma) && sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw InvalidArgument("p0 must lie in [0,1]");
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw InvalidArgument("p1 must lie in [0,1]");
}

Measurement observe_gaussian(double x, const env::WorldView& world, Rng& rng,
                             const NoiseConfig& noise, double t, Origin origin) {
    require_on_road(x, world.road);
    double value = world.pam(x);
    if (noise.sigma > 0.0) {
        std::normal_distribution<double> eps(0.0, noise.sigma);
        value += eps(rng);
    }
    return {x, value, world.mu(x), t, origin};
}

Measurement observe_indicator(double x, const env::WorldView& world, Rng& rng,
                              const NoiseConfig& noise, double t, Origin origin) {
    require_on_road(x, world.road);
    const auto m = static_cast<long long>(world.road.window_cells());
    const long long cells = static_cast<long long>(world.layout.present.size());
    const long long top =
        std::min(static_cast<long long>(std::floor(x / world.road.slot_length)), cells) - 1;

    std::bernoulli_distribution missed(noise.p1);
    std::bernoulli_distribution phantom(noise.p0);
    long long detected = 0;
    for (long long c = top; c > top - m; --c) {
        const bool free_slot =
            c >= 0 && env::cell_available(world.layout, world.traffic, static_cast<std::size_t>(c),
                                          world.road);
        if (free_slot) {
            if (!missed(rng)) ++detected;   // ω₁ ∈ {−1, 0}
        } else if (phantom(rng)) {
            ++detected;                     // ω₀ ∈ {0, 1}
        }
    }
    return {x, static_cast<double>(detected) / static_cast<double>(m), world.mu(x), t, origin};
}

Measurement observe(double x, const env::WorldView& world, Rng& rng, const NoiseConfig& noise,
                    double t, Origin origin) {
    return noise.mode == NoiseMode::indicator ? observe_indicator(x, world, rng, noise, t, origin)
                                              : observe_gaussian(x, world, rng, noise, t, origin);
}

std::vector<Measurement> generate_sources(Rng& rng, const env::WorldView& world,
                                          const NoiseConfig& noise, double t, int max_sources) {
    if (max_sources < 0) throw InvalidArgument("max_sources must be >= 0");
    std::vector<Measurement> out;
    if (max_sources == 0) return out;
    std::uniform_int_distribution<int> count(0, max_sources);
    std::uniform_real_distribution<double> where(0.0, world.road.length);
    const int n = count(rng);
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = where(rng);
        out.push_back(observe(x, world, rng, noise, t, Origin::external));
    }
    return out;
}

} // namespace pame::sensing
