#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "qdts/trajectory.hpp"

namespace qdts {

/// Per-point simplification error kernels.
///   Sed: synchronized Euclidean distance (meters)
///   Ped: perpendicular Euclidean distance (meters)
///   Dad: direction-aware distance, heading angle difference (radians, [0, pi])
///   Sad: speed-aware distance, speed difference (meters/second)
enum class ErrorMeasure { Sed, Ped, Dad, Sad };

ErrorMeasure parse_measure(std::string_view name);
std::string_view to_string(ErrorMeasure m);

/// Error of point `p` against the anchor segment ps->pe. Dad and Sad
/// compare the original segment p->p_next to the anchor, so `p_next`
/// (the point following `p` in the original trajectory) is required for
/// them and ignored otherwise.
///
/// Degenerate inputs are total: pe.t == ps.t makes Sed fall back to the
/// Euclidean distance to ps and gives the anchor speed 0 for Sad; a
/// zero-length anchor makes Ped fall back to the distance to ps and Dad
/// return 0.
double point_error(ErrorMeasure m, const Point& ps, const Point& pe, const Point& p,
                   const Point* p_next = nullptr);

/// Maximum point error over the anchor segment [s_j, s_{j+1}) of T.
double segment_error(ErrorMeasure m, const Trajectory& t, std::uint32_t s_j,
                     std::uint32_t s_j1);

/// Maximum segment error over the consecutive kept pairs of T.
/// `kept` must be sorted and contain 0 and n-1.
double trajectory_error(ErrorMeasure m, const Trajectory& t,
                        std::span<const std::uint32_t> kept);

} // namespace qdts
