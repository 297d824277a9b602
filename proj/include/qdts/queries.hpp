#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qdts/geometry.hpp"
#include "qdts/trajectory.hpp"

namespace qdts {

struct RangeQuery {
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    double t_min = 0.0, t_max = 0.0;

    bool contains(const Point& p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max &&
               p.t >= t_min && p.t <= t_max;
    }

    Box box() const { return Box{x_min, x_max, y_min, y_max, t_min, t_max}; }
};

using QueryWorkload = std::vector<RangeQuery>;

/// Sorted trajectory indices into the queried database.
using QueryResult = std::vector<std::uint32_t>;

struct TimeWindow {
    double t_start = 0.0;
    double t_end = 0.0;
};

QueryResult range_query(const TrajectoryDatabase& db, const RangeQuery& q);
QueryResult range_query(const SimplifiedDatabase& view, const RangeQuery& q);

/// Edit distance on real sequences: a pair of points matches at cost 0
/// when |dx| <= eps and |dy| <= eps, otherwise substitution, insertion
/// and deletion all cost 1.
int edr(std::span<const Point> a, std::span<const Point> b, double eps);

/// k trajectories minimizing the EDR distance to `query` restricted to
/// `window`; candidates need at least one (kept) point in the window.
/// Ties break by ascending trajectory id. Throws InsufficientCandidates
/// when fewer than k trajectories qualify.
QueryResult knn_query(const TrajectoryDatabase& db, const Trajectory& query,
                      TimeWindow window, std::size_t k, double eps);
QueryResult knn_query(const SimplifiedDatabase& view, const Trajectory& query,
                      TimeWindow window, std::size_t k, double eps);

/// Trajectories staying within `delta` of `query` at every timestamp of
/// `query`'s points inside the window; positions are interpolated
/// linearly over the (kept) points and trajectories not covering the
/// sampled timestamps are excluded.
QueryResult similarity_query(const TrajectoryDatabase& db, const Trajectory& query,
                             TimeWindow window, double delta);
QueryResult similarity_query(const SimplifiedDatabase& view, const Trajectory& query,
                             TimeWindow window, double delta);

struct F1Score {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Quality of `result` against ground truth `truth`. Conventions: both
/// empty scores (1, 1, 1); an empty result against nonempty truth has
/// precision 0; F1 is 0 whenever precision + recall is 0.
F1Score f1(const QueryResult& truth, const QueryResult& result);

/// F1 from set cardinalities. Exposed so that incremental trackers
/// produce bit-identical values to f1().
F1Score f1_from_counts(std::size_t truth_size, std::size_t result_size,
                       std::size_t intersection_size);

/// 1 - mean F1 of range query results on the view against the original
/// database. Throws EmptyWorkload on an empty workload.
double workload_diff(const TrajectoryDatabase& db, const SimplifiedDatabase& view,
                     const QueryWorkload& workload);

/// Incrementally maintained workload_diff for a view that only grows.
/// Relies on kept points being a subset of the original points, so the
/// per-query result on the view is a subset of the ground truth.
class RangeWorkloadTracker {
public:
    RangeWorkloadTracker(const TrajectoryDatabase& db, const QueryWorkload& workload,
                         const SimplifiedDatabase& initial);

    /// Account for a newly kept point. Must be called exactly once per
    /// insertion into the view.
    void on_insert(std::size_t traj, const Point& p);

    /// Matches workload_diff(db, view, workload) bit-for-bit.
    double diff() const;

private:
    struct PerQuery {
        RangeQuery query;
        std::vector<char> in_truth;
        std::vector<char> in_result;
        std::size_t truth_count = 0;
        std::size_t result_count = 0;
    };
    std::vector<PerQuery> queries_;
    std::size_t trajectory_count_ = 0;
};

} // namespace qdts
