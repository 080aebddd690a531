#include "pame/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pame/errors.hpp"

namespace pame::env {

namespace {

void require_unit(double mu, const char* what) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
        throw InvalidArgument(std::string(what) + ": traffic density " + std::to_string(mu) +
                              " outside [0,1]");
    }
}

void require_on_road(double x, double length, const char* what) {
    if (!(x >= 0.0 && x <= length)) {
        throw InvalidArgument(std::string(what) + ": position " + std::to_string(x) +
                              " outside [0, " + std::to_string(length) + "]");
    }
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

void RoadConfig::validate() const {
    if (!(std::isfinite(length) && std::isfinite(window) && std::isfinite(slot_length))) {
        throw InvalidArgument("road lengths must be finite");
    }
    if (!(slot_length > 0.0)) throw InvalidArgument("slot_length must be > 0");
    if (!(window > slot_length)) throw InvalidArgument("window must exceed slot_length");
    if (!(length > window)) throw InvalidArgument("length must exceed window");
    if (!(std::isfinite(sample_period) && sample_period > 0.0)) {
        throw InvalidArgument("sample_period must be > 0");
    }
    if (!(p_change >= 0.0 && p_change <= 1.0)) throw InvalidArgument("p_change must lie in [0,1]");
    if (!(std::isfinite(segment_length) && segment_length > 0.0)) {
        throw InvalidArgument("segment_length must be > 0");
    }
    const double segments = length / segment_length;
    if (std::abs(segments - std::round(segments)) > 1e-9 * segments || std::round(segments) < 1) {
        throw InvalidArgument("length must be a whole number of segments");
    }
}

std::size_t RoadConfig::cell_count() const {
    return static_cast<std::size_t>(std::floor(length / slot_length));
}

std::size_t RoadConfig::window_cells() const {
    return static_cast<std::size_t>(std::floor(window / slot_length));
}

std::size_t RoadConfig::segment_count() const {
    return static_cast<std::size_t>(std::llround(length / segment_length));
}

SlotLayout generate_layout(Rng& rng, const RoadConfig& cfg) {
    cfg.validate();
    std::bernoulli_distribution coin(0.5);
    SlotLayout layout;
    layout.present.resize(cfg.cell_count());
    for (std::size_t c = 0; c < layout.present.size(); ++c) layout.present[c] = coin(rng);
    layout.availability_seed = rng();
    return layout;
}

double prior_availability(const SlotLayout& layout, double x, const RoadConfig& cfg) {
    require_on_road(x, cfg.length, "prior_availability");
    const auto m = static_cast<long long>(cfg.window_cells());
    const long long cells = static_cast<long long>(layout.present.size());
    // Last whole cell ending at or before x.
    const long long top = std::min(static_cast<long long>(std::floor(x / cfg.slot_length)), cells) - 1;
    long long count = 0;
    for (long long c = top; c > top - m; --c) {
        if (c >= 0 && layout.present[static_cast<std::size_t>(c)]) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(m);
}

TrafficDensity generate_traffic(Rng& rng, const RoadConfig& cfg) {
    cfg.validate();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TrafficDensity traffic;
    traffic.segment_length = cfg.segment_length;
    traffic.segment_values.resize(cfg.segment_count());
    for (double& v : traffic.segment_values) v = unit(rng);
    return traffic;
}

TrafficDensity evolve_traffic(const TrafficDensity& traffic, Rng& rng, const RoadConfig& cfg) {
    TrafficDensity next = traffic;
    if (traffic.segment_values.empty()) return next;
    std::bernoulli_distribution change(cfg.p_change);
    if (!change(rng)) return next;
    std::uniform_int_distribution<std::size_t> pick(0, traffic.segment_values.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t k = pick(rng);
    next.segment_values[k] = unit(rng);
    ++next.version;
    return next;
}

std::size_t segment_index(const TrafficDensity& traffic, double x) {
    const double length = traffic.segment_length * static_cast<double>(traffic.segment_values.size());
    require_on_road(x, length, "traffic_at");
    const auto k = static_cast<std::size_t>(std::floor(x / traffic.segment_length));
    return std::min(k, traffic.segment_values.size() - 1);
}

double traffic_at(const TrafficDensity& traffic, double x) {
    if (traffic.segment_values.empty()) throw InvalidArgument("traffic_at: empty traffic density");
    return traffic.segment_values[segment_index(traffic, x)];
}

double attenuation(double mu) {
    require_unit(mu, "attenuation");
    return 1.0 / (1.0 + std::exp(20.0 * (mu - 0.5)));
}

double velocity(double mu) {
    require_unit(mu, "velocity");
    return 90.0 * std::exp(-mu) * 1000.0 / 3600.0;
}

double true_pam(const SlotLayout& layout, const TrafficDensity& traffic, double x,
                const RoadConfig& cfg) {
    return prior_availability(layout, x, cfg) * attenuation(traffic_at(traffic, x));
}

bool cell_available(const SlotLayout& layout, const TrafficDensity& traffic, std::size_t cell,
                    const RoadConfig& cfg) {
    if (cell >= layout.present.size() || !layout.present[cell]) return false;
    const double centre = std::min((static_cast<double>(cell) + 0.5) * cfg.slot_length, cfg.length);
    const std::uint64_t h =
        splitmix64(layout.availability_seed ^ splitmix64(traffic.version ^ splitmix64(cell)));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return u < attenuation(traffic_at(traffic, centre));
}

} // namespace pame::env
