#include "qdts/octree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "qdts/errors.hpp"

namespace qdts {

bool query_cube_intersects(const RangeQuery& q, const Box& cube) {
    return q.box().intersects(cube);
}

Box Octree::child_box(const Box& b, int octant) {
    const double xm = 0.5 * (b.x_min + b.x_max);
    const double ym = 0.5 * (b.y_min + b.y_max);
    const double tm = 0.5 * (b.t_min + b.t_max);
    Box c = b;
    if (octant & 1)
        c.x_min = xm;
    else
        c.x_max = xm;
    if (octant & 2)
        c.y_min = ym;
    else
        c.y_max = ym;
    if (octant & 4)
        c.t_min = tm;
    else
        c.t_max = tm;
    return c;
}

int Octree::octant_of(const Box& b, const Point& p) {
    // A point exactly on a split plane goes to the lower octant.
    const double xm = 0.5 * (b.x_min + b.x_max);
    const double ym = 0.5 * (b.y_min + b.y_max);
    const double tm = 0.5 * (b.t_min + b.t_max);
    return (p.x > xm ? 1 : 0) | (p.y > ym ? 2 : 0) | (p.t > tm ? 4 : 0);
}

Octree::Octree(const TrajectoryDatabase& db, const QueryWorkload& workload, int max_depth)
    : max_depth_(max_depth) {
    if (max_depth < 2) throw std::invalid_argument("octree depth must be at least 2");
    if (db.point_count() == 0) throw std::invalid_argument("octree needs a nonempty database");

    Box root_box = db.bounds();
    const auto pad = [](double lo, double hi) {
        return 1e-9 * std::max({hi - lo, std::abs(lo), std::abs(hi), 1.0});
    };
    const double px = pad(root_box.x_min, root_box.x_max);
    const double py = pad(root_box.y_min, root_box.y_max);
    const double pt = pad(root_box.t_min, root_box.t_max);
    root_box.x_min -= px;
    root_box.x_max += px;
    root_box.y_min -= py;
    root_box.y_max += py;
    root_box.t_min -= pt;
    root_box.t_max += pt;

    nodes_.push_back(Node{});
    nodes_[0].box = root_box;
    nodes_[0].level = 1;

    for (std::size_t ti = 0; ti < db.trajectory_count(); ++ti) {
        const Trajectory& t = db.trajectory(ti);
        for (std::uint32_t pi = 0; pi < t.points.size(); ++pi) {
            const Point& p = t.points[pi];
            NodeRef cur = 0;
            for (int lvl = 1;; ++lvl) {
                Node& node = nodes_[cur];
                node.n += 1;
                if (node.last_traj != std::int64_t(ti)) {
                    node.last_traj = std::int64_t(ti);
                    node.m += 1;
                }
                if (lvl == max_depth_) {
                    node.entries.push_back(
                        PointEntry{static_cast<std::uint32_t>(ti), pi});
                    break;
                }
                const int oct = octant_of(node.box, p);
                NodeRef next = node.children[oct];
                if (next == kNone) {
                    next = static_cast<NodeRef>(nodes_.size());
                    const Box cb = child_box(node.box, oct);
                    nodes_[cur].children[oct] = next;
                    nodes_.push_back(Node{});
                    nodes_[next].box = cb;
                    nodes_[next].level = lvl + 1;
                }
                cur = next;
            }
        }
    }

    for (const RangeQuery& q : workload) count_query(0, q);

    levels_.resize(max_depth_);
    for (NodeRef i = 0; i < nodes_.size(); ++i)
        levels_[nodes_[i].level - 1].push_back(i);

    reset_uninserted();
}

void Octree::count_query(NodeRef n, const RangeQuery& q) {
    Node& node = nodes_[n];
    node.q += 1;
    for (int oct = 0; oct < 8; ++oct) {
        if (!query_cube_intersects(q, child_box(node.box, oct))) continue;
        node.q_child[oct] += 1;
        if (node.children[oct] != kNone) count_query(node.children[oct], q);
    }
}

void Octree::reset_uninserted() {
    for (Node& node : nodes_) node.uninserted = node.n;
}

void Octree::mark_inserted(const Point& p) {
    NodeRef cur = 0;
    for (int lvl = 1;; ++lvl) {
        Node& node = nodes_[cur];
        assert(node.uninserted > 0);
        node.uninserted -= 1;
        if (lvl == max_depth_) break;
        cur = node.children[octant_of(node.box, p)];
        assert(cur != kNone);
    }
}

std::array<double, 16> Octree::cube_state(NodeRef n) const {
    const Node& node = nodes_[n];
    std::array<double, 16> state{};
    for (int oct = 0; oct < 8; ++oct) {
        const NodeRef c = node.children[oct];
        state[2 * oct] = (c != kNone && node.m > 0)
                             ? double(nodes_[c].m) / double(node.m)
                             : 0.0;
        state[2 * oct + 1] =
            node.q > 0 ? double(node.q_child[oct]) / double(node.q) : 0.0;
    }
    return state;
}

Octree::NodeRef Octree::locate(const Point& p, int lvl) const {
    assert(lvl >= 1 && lvl <= max_depth_);
    NodeRef cur = 0;
    for (int l = 1; l < lvl; ++l) {
        cur = nodes_[cur].children[octant_of(nodes_[cur].box, p)];
        if (cur == kNone) return kNone;
    }
    return cur;
}

CubeId Octree::id_of(NodeRef n) const {
    CubeId id;
    id.level = nodes_[n].level;
    id.path.resize(id.level - 1);
    // Recover the path by locating the node's box center from the root.
    NodeRef cur = 0;
    for (int l = 1; l < id.level; ++l) {
        const Node& node = nodes_[cur];
        const Box& target = nodes_[n].box;
        const Point center{0.5 * (target.x_min + target.x_max),
                           0.5 * (target.y_min + target.y_max),
                           0.5 * (target.t_min + target.t_max)};
        const int oct = octant_of(node.box, center);
        id.path[l - 1] = static_cast<std::uint8_t>(oct);
        cur = node.children[oct];
        assert(cur != kNone);
    }
    assert(cur == n);
    return id;
}

Octree::NodeRef Octree::find(const CubeId& id) const {
    if (id.level < 1 || id.level > max_depth_) return kNone;
    NodeRef cur = 0;
    for (std::uint8_t oct : id.path) {
        if (oct >= 8) return kNone;
        cur = nodes_[cur].children[oct];
        if (cur == kNone) return kNone;
    }
    return cur;
}

Octree::NodeRef sample_start_cube(const Octree& octree, int start_level,
                                  std::mt19937_64& rng) {
    const auto& cubes = octree.level_nodes(start_level);
    std::uint64_t total_q = 0;
    std::uint64_t total_n = 0;
    bool any = false;
    for (Octree::NodeRef n : cubes) {
        if (octree.uninserted_count(n) == 0) continue;
        any = true;
        total_q += octree.query_count(n);
        total_n += octree.point_count(n);
    }
    if (!any)
        throw Exhausted("no level-" + std::to_string(start_level) +
                        " cube has an uninserted point");

    const bool by_query = total_q > 0;
    const std::uint64_t total = by_query ? total_q : total_n;
    std::uint64_t pick = std::uniform_int_distribution<std::uint64_t>(0, total - 1)(rng);
    for (Octree::NodeRef n : cubes) {
        if (octree.uninserted_count(n) == 0) continue;
        const std::uint64_t w =
            by_query ? octree.query_count(n) : octree.point_count(n);
        if (pick < w) return n;
        pick -= w;
    }
    throw std::logic_error("start-cube sampling fell through");
}

} // namespace qdts
