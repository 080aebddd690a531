#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pame/rng.hpp"

namespace pame::env {

/// Road geometry and traffic dynamics. Lengths in meters, times in seconds.
struct RoadConfig {
    double length = 10000.0;          // L
    double slot_length = 5.0;         // D
    double window = 100.0;            // W
    double sample_period = 10.0;      // T
    double segment_length = 1000.0;   // traffic is constant over each segment
    double p_change = 0.2;

    void validate() const;

    [[nodiscard]] std::size_t cell_count() const;      // ⌊L/D⌋
    [[nodiscard]] std::size_t window_cells() const;    // ⌊W/D⌋
    [[nodiscard]] std::size_t segment_count() const;   // L / segment_length

    friend bool operator==(const RoadConfig&, const RoadConfig&) = default;
};

/// Presence of a parking slot in each D-long cell; cell c spans [cD, (c+1)D).
struct SlotLayout {
    std::vector<bool> present;
    /// Seeds the per-cell availability draws used by the indicator observation model.
    std::uint64_t availability_seed = 0;
};

/// Piecewise-constant congestion level in [0,1], one value per segment.
struct TrafficDensity {
    std::vector<double> segment_values;
    double segment_length = 1000.0;
    std::uint64_t version = 0;
};

SlotLayout generate_layout(Rng& rng, const RoadConfig& cfg);

/// Fraction of the ⌊W/D⌋ whole cells ending at ⌊x/D⌋·D that hold a slot.
/// Cells below the road start count as absent.
double prior_availability(const SlotLayout& layout, double x, const RoadConfig& cfg);

TrafficDensity generate_traffic(Rng& rng, const RoadConfig& cfg);

/// With probability p_change, redraws one uniformly chosen segment and bumps the version.
TrafficDensity evolve_traffic(const TrafficDensity& traffic, Rng& rng, const RoadConfig& cfg);

/// Segment k covers [k·len, (k+1)·len); x = L maps to the last segment.
double traffic_at(const TrafficDensity& traffic, double x);
std::size_t segment_index(const TrafficDensity& traffic, double x);

/// (1 + e^{20(μ−0.5)})⁻¹
double attenuation(double mu);

/// 90·e^{−μ} km/h, returned in m/s.
double velocity(double mu);

double true_pam(const SlotLayout& layout, const TrafficDensity& traffic, double x,
                const RoadConfig& cfg);

/// Whether slot `cell` is present and free under the given traffic. A present
/// slot is free iff a uniform draw fixed per (layout, traffic version, cell)
/// falls below λ(μ) at the cell.
bool cell_available(const SlotLayout& layout, const TrafficDensity& traffic, std::size_t cell,
                    const RoadConfig& cfg);

/// Read-only bundle of one world state.
struct WorldView {
    const RoadConfig& road;
    const SlotLayout& layout;
    const TrafficDensity& traffic;

    [[nodiscard]] double pam(double x) const { return true_pam(layout, traffic, x, road); }
    [[nodiscard]] double prior(double x) const { return prior_availability(layout, x, road); }
    [[nodiscard]] double mu(double x) const { return traffic_at(traffic, x); }
};

} // namespace pame::env
