#pragma once

#include <cstdint>

#include "qdts/trajectory.hpp"

namespace qdts {

/// Reproducible desk-scale trajectory generator. Objects start at a
/// random location, travel through two activity hotspots (dwelling at
/// each) and leave; interior points therefore concentrate around the
/// hotspots while the endpoints scatter, which is the regime the
/// simplifiers are evaluated in.
struct SynthSpec {
    std::size_t trajectory_count = 300;
    std::size_t points_per_trajectory = 333;
    double domain_size = 50000.0;  // square side, meters
    double time_span = 7.0 * 86400;  // start-time spread, seconds
    std::size_t hotspot_count = 6;
    double hotspot_radius = 2000.0;
    double step_seconds = 30.0;
    std::uint64_t seed = 0;
};

TrajectoryDatabase synth_database(const SynthSpec& spec);

} // namespace qdts
