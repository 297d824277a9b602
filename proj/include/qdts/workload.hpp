#pragma once

#include <cstdint>
#include <span>

#include "qdts/queries.hpp"
#include "qdts/trajectory.hpp"

namespace qdts {

enum class CenterDistribution { Data, Gaussian, Zipf };

CenterDistribution parse_distribution(std::string_view name);
std::string_view to_string(CenterDistribution d);

struct WorkloadSpec {
    std::size_t count = 100;
    CenterDistribution distribution = CenterDistribution::Data;
    double gaussian_mu = 0.5;
    double gaussian_sigma = 0.25;
    double zipf_a = 4.0;
    double spatial_extent = 2000.0;        // query side length, meters
    double temporal_extent = 7.0 * 86400;  // query duration, seconds
    std::uint64_t seed = 0;
};

/// Range queries of the spec's extents centered per the distribution:
/// data picks uniform database points, gaussian draws clamped normalized
/// coordinates over the bounding box, zipf ranks a 64x64 spatial grid by
/// density and samples the rank. Deterministic under a fixed seed.
QueryWorkload generate(const TrajectoryDatabase& db, const WorkloadSpec& spec);

/// Same geometry with centers sampled uniformly from an external list
/// (e.g. pickup/dropoff locations).
QueryWorkload generate_from_centers(std::span<const Point> centers,
                                    const WorkloadSpec& spec);

} // namespace qdts
