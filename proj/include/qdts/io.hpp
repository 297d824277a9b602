#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "qdts/queries.hpp"
#include "qdts/trajectory.hpp"

namespace qdts {

enum class TrajectoryFormat { Csv };

/// Equirectangular projection of (lat, lon) degrees about a reference,
/// returning planar (x, y) meters. Throws OutOfRangeCoordinate outside
/// |lat| <= 90, |lon| <= 180.
std::pair<double, double> project_latlon(double lat, double lon, double ref_lat,
                                         double ref_lon);

/// Load a point CSV with header `traj_id,t,x,y` or `traj_id,t,lat,lon`.
/// Rows are grouped by trajectory id and sorted by time; lat/lon input
/// is projected to meters about the midpoint of the coordinate ranges.
TrajectoryDatabase load_trajectories(const std::filesystem::path& path,
                                     TrajectoryFormat format = TrajectoryFormat::Csv);

/// Write the `traj_id,t,x,y` form; load_trajectories round-trips it.
void save_trajectories(const TrajectoryDatabase& db, const std::filesystem::path& path);

/// Workload CSV: `x_min,x_max,y_min,y_max,t_min,t_max` per row.
QueryWorkload load_workload(const std::filesystem::path& path);
void save_workload(const QueryWorkload& workload, const std::filesystem::path& path);

/// Kept-index CSV: `traj_id,kept_index` per row, indices 0-based.
void save_kept(const SimplifiedDatabase& view, const std::filesystem::path& path);
SimplifiedDatabase load_kept(const TrajectoryDatabase& db,
                             const std::filesystem::path& path);

/// Query-center CSV for externally supplied distributions: `x,y,t` rows.
std::vector<Point> load_centers(const std::filesystem::path& path);

} // namespace qdts
