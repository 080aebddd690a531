#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pame/errors.hpp"
#include "pame/sensing.hpp"

using namespace pame;
using sensing::NoiseConfig;
using sensing::NoiseMode;

namespace {

struct World {
    env::RoadConfig road;
    env::SlotLayout layout;
    env::TrafficDensity traffic;

    explicit World(std::uint64_t seed) {
        Rng rng(seed);
        layout = env::generate_layout(rng, road);
        traffic = env::generate_traffic(rng, road);
    }

    env::WorldView view() const { return {road, layout, traffic}; }
};

} // namespace

TEST_CASE("noise config validation") {
    CHECK_NOTHROW(NoiseConfig{}.validate());
    CHECK_THROWS_AS((NoiseConfig{-0.1, 0.05, 0.05, NoiseMode::gaussian}.validate()), InvalidArgument);
    CHECK_THROWS_AS((NoiseConfig{0.03, 1.5, 0.05, NoiseMode::gaussian}.validate()), InvalidArgument);
    CHECK_THROWS_AS((NoiseConfig{0.03, 0.05, -0.5, NoiseMode::gaussian}.validate()), InvalidArgument);
}

TEST_CASE("gaussian observation") {
    const World w(3);
    const auto view = w.view();
    Rng rng(4);
    const double x = 4567.0;

    NoiseConfig exact;
    exact.sigma = 0.0;
    const auto m = sensing::observe_gaussian(x, view, rng, exact, 12.0);
    CHECK(m.value == view.pam(x));
    CHECK(m.position == x);
    CHECK(m.timestamp == 12.0);
    CHECK(m.traffic_tag == env::traffic_at(w.traffic, x));
    CHECK(m.origin == sensing::Origin::platform);

    const NoiseConfig noise;
    std::vector<double> v;
    for (int i = 0; i < 10000; ++i) v.push_back(sensing::observe_gaussian(x, view, rng, noise, 0.0).value);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (const double e : v) ss += (e - mean) * (e - mean);
    const double sd = std::sqrt(ss / (v.size() - 1));
    CHECK(std::fabs(mean - view.pam(x)) <= 4.0 * noise.sigma / 100.0);
    CHECK(sd >= 0.95 * noise.sigma);
    CHECK(sd <= 1.05 * noise.sigma);

    SUBCASE("values are not clamped") {
        NoiseConfig loud;
        loud.sigma = 1.0;
        bool outside = false;
        for (int i = 0; i < 200; ++i) {
            const double y = sensing::observe_gaussian(x, view, rng, loud, 0.0).value;
            outside = outside || y < 0.0 || y > 1.0;
        }
        CHECK(outside);
    }
    SUBCASE("deterministic under seed") {
        Rng a(99), b(99);
        for (int i = 0; i < 10; ++i) {
            CHECK(sensing::observe_gaussian(x, view, a, noise, 0.0).value ==
                  sensing::observe_gaussian(x, view, b, noise, 0.0).value);
        }
    }
    CHECK_THROWS_AS(sensing::observe_gaussian(-1.0, view, rng, noise, 0.0), InvalidArgument);
    CHECK_THROWS_AS(sensing::observe_gaussian(10001.0, view, rng, noise, 0.0), InvalidArgument);
}

TEST_CASE("indicator observation edge cases") {
    World w(5);
    Rng rng(6);
    const double x = 3000.0;
    NoiseConfig cfg;
    cfg.mode = NoiseMode::indicator;

    SUBCASE("noiseless reads the available fraction") {
        cfg.p0 = cfg.p1 = 0.0;
        const auto view = w.view();
        const std::size_t top = static_cast<std::size_t>(x / w.road.slot_length);
        int avail = 0;
        for (std::size_t c = top - 20; c < top; ++c) avail += env::cell_available(w.layout, w.traffic, c, w.road);
        CHECK(sensing::observe_indicator(x, view, rng, cfg, 0.0).value == avail / 20.0);
    }
    SUBCASE("total mis-detection") {
        w.layout.present.assign(w.road.cell_count(), true);
        w.traffic.segment_values.assign(w.traffic.segment_values.size(), 0.0);
        cfg.p0 = 0.0;
        cfg.p1 = 1.0;
        CHECK(sensing::observe_indicator(x, w.view(), rng, cfg, 0.0).value == 0.0);
    }
    SUBCASE("total false positives") {
        w.layout.present.assign(w.road.cell_count(), false);
        cfg.p0 = 1.0;
        cfg.p1 = 0.0;
        CHECK(sensing::observe_indicator(x, w.view(), rng, cfg, 0.0).value == 1.0);
    }
    SUBCASE("dispatch on mode") {
        Rng a(1), b(1);
        CHECK(sensing::observe(x, w.view(), a, cfg, 0.0).value ==
              sensing::observe_indicator(x, w.view(), b, cfg, 0.0).value);
    }
}

TEST_CASE("indicator expectation matches the closed form") {
    const World w(7);
    const auto view = w.view();
    NoiseConfig cfg;
    cfg.mode = NoiseMode::indicator;
    cfg.p0 = 0.1;
    cfg.p1 = 0.2;
    const double x = 6543.0;
    const std::size_t top = static_cast<std::size_t>(x / w.road.slot_length);
    const double m = 20.0;
    double a = 0.0;
    for (std::size_t c = top - 20; c < top; ++c) a += env::cell_available(w.layout, w.traffic, c, w.road);
    const double expected = (a * (1.0 - cfg.p1) + (m - a) * cfg.p0) / m;

    Rng rng(8);
    double sum = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) sum += sensing::observe_indicator(x, view, rng, cfg, 0.0).value;
    CHECK(sum / draws == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("external sources") {
    const World w(9);
    const auto view = w.view();
    const NoiseConfig noise;
    Rng rng(10);
    CHECK(sensing::generate_sources(rng, view, noise, 0.0, 0).empty());

    double total = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const auto src = sensing::generate_sources(rng, view, noise, 5.0, 10);
        CHECK(src.size() <= 10);
        total += static_cast<double>(src.size());
        for (const auto& m : src) {
            CHECK(m.position >= 0.0);
            CHECK(m.position <= w.road.length);
            CHECK(m.origin == sensing::Origin::external);
            CHECK(m.timestamp == 5.0);
            CHECK(m.traffic_tag == env::traffic_at(w.traffic, m.position));
        }
    }
    CHECK(total / draws >= 4.8);
    CHECK(total / draws <= 5.2);
}
