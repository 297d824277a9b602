#include "qdts/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "qdts/rng.hpp"

namespace qdts {

TrajectoryDatabase synth_database(const SynthSpec& spec) {
    std::mt19937_64 rng(derive_seed(spec.seed, 0x73796e7468));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Point> hotspots(spec.hotspot_count);
    for (Point& h : hotspots) {
        h.x = (0.15 + 0.7 * unit(rng)) * spec.domain_size;
        h.y = (0.15 + 0.7 * unit(rng)) * spec.domain_size;
    }

    const auto uniform_point = [&] {
        return Point{unit(rng) * spec.domain_size, unit(rng) * spec.domain_size, 0.0};
    };
    const auto near_hotspot = [&](const Point& h) {
        return Point{h.x + gauss(rng) * spec.hotspot_radius,
                     h.y + gauss(rng) * spec.hotspot_radius, 0.0};
    };

    std::vector<Trajectory> trajectories;
    trajectories.reserve(spec.trajectory_count);
    for (std::size_t ti = 0; ti < spec.trajectory_count; ++ti) {
        const Point a = uniform_point();
        const Point h1 = near_hotspot(hotspots[rng() % hotspots.size()]);
        const Point h2 = near_hotspot(hotspots[rng() % hotspots.size()]);
        const Point b = uniform_point();

        // Leg point shares: travel / dwell / travel / dwell / travel.
        const std::size_t n = spec.points_per_trajectory;
        const std::size_t n_leg1 = n / 4;
        const std::size_t n_dwell1 = n / 5;
        const std::size_t n_leg2 = n / 4;
        const std::size_t n_dwell2 = n - n_leg1 - n_dwell1 - n_leg2 - n / 10;
        const std::size_t n_leg3 = n - n_leg1 - n_dwell1 - n_leg2 - n_dwell2;

        Trajectory t;
        t.id = "S" + std::to_string(ti);
        t.points.reserve(n);
        double clock = unit(rng) * spec.time_span;
        const double wobble = 0.02 * spec.domain_size;
        const double dwell_jitter = 0.35 * spec.hotspot_radius;

        const auto advance = [&] {
            clock += spec.step_seconds * (0.8 + 0.4 * unit(rng));
            return clock;
        };
        const auto leg = [&](const Point& from, const Point& to, std::size_t count) {
            for (std::size_t i = 0; i < count; ++i) {
                const double tau = count == 1 ? 0.0 : double(i) / double(count - 1);
                t.points.push_back(Point{from.x + tau * (to.x - from.x) + gauss(rng) * wobble,
                                         from.y + tau * (to.y - from.y) + gauss(rng) * wobble,
                                         advance()});
            }
        };
        const auto dwell = [&](const Point& at, std::size_t count) {
            for (std::size_t i = 0; i < count; ++i)
                t.points.push_back(Point{at.x + gauss(rng) * dwell_jitter,
                                         at.y + gauss(rng) * dwell_jitter, advance()});
        };

        leg(a, h1, n_leg1);
        dwell(h1, n_dwell1);
        leg(h1, h2, n_leg2);
        dwell(h2, n_dwell2);
        leg(h2, b, n_leg3);
        trajectories.push_back(std::move(t));
    }
    return TrajectoryDatabase(std::move(trajectories));
}

} // namespace qdts
