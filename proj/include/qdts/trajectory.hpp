#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdts/geometry.hpp"

namespace qdts {

/// A time-ordered sequence of points describing one moving object.
/// Invariants: at least two points, strictly increasing timestamps.
struct Trajectory {
    std::string id;
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
};

/// Immutable collection of trajectories. Validates all trajectory
/// invariants on construction and is safe to share across threads.
class TrajectoryDatabase {
public:
    TrajectoryDatabase() = default;
    explicit TrajectoryDatabase(std::vector<Trajectory> trajectories);

    std::size_t trajectory_count() const { return trajectories_.size(); }
    std::size_t point_count() const { return point_count_; }

    const Trajectory& trajectory(std::size_t i) const { return trajectories_[i]; }
    const std::vector<Trajectory>& trajectories() const { return trajectories_; }

    std::optional<std::size_t> index_of(std::string_view id) const;

    /// Tight bounding box over all points.
    const Box& bounds() const { return bounds_; }

private:
    std::vector<Trajectory> trajectories_;
    std::size_t point_count_ = 0;
    Box bounds_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

/// Consecutive kept indices (s_j, s_{j+1}) with s_j <= i < s_{j+1}.
/// The last point maps to the final segment. `kept` must be sorted and
/// contain 0 and n-1.
std::pair<std::uint32_t, std::uint32_t>
anchor_segment(std::span<const std::uint32_t> kept, std::uint32_t i);

/// A simplified database: per-trajectory sorted kept-index sets under a
/// global point budget. It is a view over the original database; points
/// are never copied. Mutation is insertion-only and every trajectory
/// always retains its first and last point.
class SimplifiedDatabase {
public:
    /// Most simplified state: endpoints of every trajectory.
    SimplifiedDatabase(const TrajectoryDatabase& db, std::size_t budget);

    /// Assemble from precomputed kept sets (used by the baseline
    /// simplifiers and by checkpoint/CSV loading). Validates sortedness,
    /// uniqueness and endpoint retention.
    static SimplifiedDatabase from_kept_sets(const TrajectoryDatabase& db,
                                             std::vector<std::vector<std::uint32_t>> kept,
                                             std::size_t budget);

    const TrajectoryDatabase& database() const { return *db_; }
    std::size_t budget() const { return budget_; }
    std::size_t kept_count() const { return kept_count_; }

    const std::vector<std::uint32_t>& kept(std::size_t traj) const { return kept_[traj]; }
    bool is_kept(std::size_t traj, std::uint32_t idx) const {
        return kept_flags_[traj][idx] != 0;
    }

    void insert(std::size_t traj, std::uint32_t idx);

private:
    SimplifiedDatabase() = default;
    void check_invariants() const;

    const TrajectoryDatabase* db_ = nullptr;
    std::vector<std::vector<std::uint32_t>> kept_;
    std::vector<std::vector<char>> kept_flags_;
    std::size_t kept_count_ = 0;
    std::size_t budget_ = 0;
};

} // namespace qdts
