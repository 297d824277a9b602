#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "qdts/geometry.hpp"
#include "qdts/queries.hpp"
#include "qdts/trajectory.hpp"

namespace qdts {

/// Identifies a cube by its level (root = 1) and the octant path from
/// the root, octant indices in [0, 8).
struct CubeId {
    int level = 1;
    std::vector<std::uint8_t> path;
};

bool query_cube_intersects(const RangeQuery& q, const Box& cube);

/// Hierarchical spatio-temporal partition of a database. Every level
/// halves each dimension of the root box; a point sitting exactly on a
/// split plane belongs to the lower octant. Nodes are materialized only
/// where points exist, down to level `max_depth`, and carry the number
/// of intersecting trajectories (M), workload queries (Q) and contained
/// points (N).
///
/// Statistics are immutable after construction except the uninserted
/// counters, which track how many contained points a simplification run
/// has not yet kept (endpoints included until marked).
class Octree {
public:
    using NodeRef = std::uint32_t;
    static constexpr NodeRef kNone = std::numeric_limits<NodeRef>::max();

    Octree(const TrajectoryDatabase& db, const QueryWorkload& workload, int max_depth);

    int max_depth() const { return max_depth_; }
    const Box& bounds() const { return nodes_[0].box; }

    NodeRef root() const { return 0; }
    NodeRef child(NodeRef n, int octant) const { return nodes_[n].children[octant]; }
    int level(NodeRef n) const { return nodes_[n].level; }
    const Box& node_bounds(NodeRef n) const { return nodes_[n].box; }

    std::size_t trajectory_count(NodeRef n) const { return nodes_[n].m; }
    std::size_t query_count(NodeRef n) const { return nodes_[n].q; }
    std::size_t point_count(NodeRef n) const { return nodes_[n].n; }

    /// Queries intersecting the octant's box, materialized or not.
    std::size_t child_query_count(NodeRef n, int octant) const {
        return nodes_[n].q_child[octant];
    }

    std::size_t uninserted_count(NodeRef n) const { return nodes_[n].uninserted; }

    /// Restore all uninserted counters to the full point counts.
    void reset_uninserted();

    /// Decrement the uninserted counters along the point's root-to-leaf
    /// path. Call once per point insertion (endpoints included).
    void mark_inserted(const Point& p);

    /// Eq-4 observation at a node: interleaved (M ratio, Q ratio) for
    /// the 8 octants; absent children contribute a zero M ratio and 0/0
    /// is defined as 0.
    std::array<double, 16> cube_state(NodeRef n) const;

    /// The level-`lvl` node containing p (lvl in [1, max_depth]).
    NodeRef locate(const Point& p, int lvl) const;

    const std::vector<NodeRef>& level_nodes(int lvl) const { return levels_[lvl - 1]; }

    CubeId id_of(NodeRef n) const;
    NodeRef find(const CubeId& id) const;

    struct PointEntry {
        std::uint32_t traj;
        std::uint32_t index;
    };

    /// Visit every database point stored under `n`, pruning exhausted
    /// subtrees (those whose points are all inserted).
    template <class Fn>
    void for_each_uninserted_point(NodeRef n, Fn&& fn) const {
        if (nodes_[n].uninserted == 0) return;
        if (nodes_[n].level == max_depth_) {
            for (const PointEntry& e : nodes_[n].entries) fn(e);
            return;
        }
        for (NodeRef c : nodes_[n].children)
            if (c != kNone) for_each_uninserted_point(c, fn);
    }

private:
    struct Node {
        Box box;
        int level = 1;
        std::array<NodeRef, 8> children{kNone, kNone, kNone, kNone,
                                        kNone, kNone, kNone, kNone};
        std::uint32_t m = 0;
        std::uint32_t q = 0;
        std::uint32_t n = 0;
        std::uint32_t uninserted = 0;
        std::array<std::uint32_t, 8> q_child{};
        std::int64_t last_traj = -1;
        std::vector<PointEntry> entries;
    };

    static Box child_box(const Box& b, int octant);
    static int octant_of(const Box& b, const Point& p);
    void count_query(NodeRef n, const RangeQuery& q);

    std::vector<Node> nodes_;
    std::vector<std::vector<NodeRef>> levels_;
    int max_depth_ = 0;
};

inline Octree build_octree(const TrajectoryDatabase& db, const QueryWorkload& workload,
                           int max_depth) {
    return Octree(db, workload, max_depth);
}

/// Sample a materialized level-`start_level` cube with at least one
/// uninserted point, with probability proportional to its query count;
/// falls back to point-count weighting when all eligible query counts
/// are zero. Throws Exhausted when no eligible cube remains.
Octree::NodeRef sample_start_cube(const Octree& octree, int start_level,
                                  std::mt19937_64& rng);

} // namespace qdts
