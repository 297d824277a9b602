#include "qdts/queries.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "qdts/errors.hpp"

namespace qdts {

namespace {

// Kept points of one trajectory, in time order.
struct KeptPoints {
    const Trajectory* traj;
    std::span<const std::uint32_t> kept;  // empty means "all points"

    std::size_t size() const { return kept.empty() ? traj->points.size() : kept.size(); }
    const Point& operator[](std::size_t i) const {
        return kept.empty() ? traj->points[i] : traj->points[kept[i]];
    }
};

KeptPoints points_of(const TrajectoryDatabase& db, std::size_t i) {
    return {&db.trajectory(i), {}};
}

KeptPoints points_of(const SimplifiedDatabase& view, std::size_t i) {
    return {&view.database().trajectory(i), view.kept(i)};
}

template <class View>
QueryResult range_query_impl(const View& view, const TrajectoryDatabase& db,
                             const RangeQuery& q) {
    QueryResult out;
    for (std::size_t i = 0; i < db.trajectory_count(); ++i) {
        const KeptPoints pts = points_of(view, i);
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (q.contains(pts[j])) {
                out.push_back(static_cast<std::uint32_t>(i));
                break;
            }
        }
    }
    return out;
}

std::vector<Point> window_slice(const KeptPoints& pts, TimeWindow w) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point& p = pts[i];
        if (p.t >= w.t_start && p.t <= w.t_end) out.push_back(p);
    }
    return out;
}

template <class View>
QueryResult knn_impl(const View& view, const TrajectoryDatabase& db,
                     const Trajectory& query, TimeWindow window, std::size_t k,
                     double eps) {
    const std::vector<Point> q_slice =
        window_slice(KeptPoints{&query, {}}, window);

    struct Scored {
        int dist;
        std::uint32_t idx;
        const std::string* id;
    };
    std::vector<Scored> scored;
    for (std::size_t i = 0; i < db.trajectory_count(); ++i) {
        const std::vector<Point> t_slice = window_slice(points_of(view, i), window);
        if (t_slice.empty()) continue;
        scored.push_back(Scored{edr(q_slice, t_slice, eps),
                                static_cast<std::uint32_t>(i), &db.trajectory(i).id});
    }
    if (scored.size() < k)
        throw InsufficientCandidates("knn: " + std::to_string(scored.size()) +
                                     " candidate(s) for k=" + std::to_string(k));
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return *a.id < *b.id;
    });
    QueryResult out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].idx);
    std::sort(out.begin(), out.end());
    return out;
}

// Position at time `when`, interpolated linearly over the (kept) points.
// Requires pts to cover `when`.
Point interpolate_at(const KeptPoints& pts, double when) {
    std::size_t lo = 0, hi = pts.size() - 1;
    // Binary search for the bracketing pair.
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (pts[mid].t <= when)
            lo = mid;
        else
            hi = mid;
    }
    const Point& a = pts[lo];
    const Point& b = pts[hi];
    if (when <= a.t) return a;
    if (when >= b.t) return b;
    const double tau = (when - a.t) / (b.t - a.t);
    return Point{a.x + tau * (b.x - a.x), a.y + tau * (b.y - a.y), when};
}

template <class View>
QueryResult similarity_impl(const View& view, const TrajectoryDatabase& db,
                            const Trajectory& query, TimeWindow window, double delta) {
    std::vector<double> sample_times;
    for (const Point& p : query.points)
        if (p.t >= window.t_start && p.t <= window.t_end) sample_times.push_back(p.t);
    if (sample_times.empty()) return {};

    const double lo = sample_times.front();
    const double hi = sample_times.back();

    QueryResult out;
    for (std::size_t i = 0; i < db.trajectory_count(); ++i) {
        const KeptPoints pts = points_of(view, i);
        if (pts[0].t > lo || pts[pts.size() - 1].t < hi) continue;  // no coverage
        bool within = true;
        for (double when : sample_times) {
            const Point q_pos = interpolate_at(KeptPoints{&query, {}}, when);
            const Point t_pos = interpolate_at(pts, when);
            if (spatial_distance(q_pos, t_pos) > delta) {
                within = false;
                break;
            }
        }
        if (within) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

} // namespace

QueryResult range_query(const TrajectoryDatabase& db, const RangeQuery& q) {
    return range_query_impl(db, db, q);
}

QueryResult range_query(const SimplifiedDatabase& view, const RangeQuery& q) {
    return range_query_impl(view, view.database(), q);
}

int edr(std::span<const Point> a, std::span<const Point> b, double eps) {
    const std::size_t na = a.size(), nb = b.size();
    std::vector<int> prev(nb + 1), cur(nb + 1);
    for (std::size_t j = 0; j <= nb; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= na; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= nb; ++j) {
            const bool match = std::abs(a[i - 1].x - b[j - 1].x) <= eps &&
                               std::abs(a[i - 1].y - b[j - 1].y) <= eps;
            const int subst = prev[j - 1] + (match ? 0 : 1);
            cur[j] = std::min({subst, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[nb];
}

QueryResult knn_query(const TrajectoryDatabase& db, const Trajectory& query,
                      TimeWindow window, std::size_t k, double eps) {
    return knn_impl(db, db, query, window, k, eps);
}

QueryResult knn_query(const SimplifiedDatabase& view, const Trajectory& query,
                      TimeWindow window, std::size_t k, double eps) {
    return knn_impl(view, view.database(), query, window, k, eps);
}

QueryResult similarity_query(const TrajectoryDatabase& db, const Trajectory& query,
                             TimeWindow window, double delta) {
    return similarity_impl(db, db, query, window, delta);
}

QueryResult similarity_query(const SimplifiedDatabase& view, const Trajectory& query,
                             TimeWindow window, double delta) {
    return similarity_impl(view, view.database(), query, window, delta);
}

F1Score f1_from_counts(std::size_t truth_size, std::size_t result_size,
                       std::size_t intersection_size) {
    F1Score s;
    s.precision = result_size == 0 ? (truth_size == 0 ? 1.0 : 0.0)
                                   : double(intersection_size) / double(result_size);
    s.recall = truth_size == 0 ? 1.0 : double(intersection_size) / double(truth_size);
    const double pr = s.precision + s.recall;
    s.f1 = pr == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / pr;
    return s;
}

F1Score f1(const QueryResult& truth, const QueryResult& result) {
    assert(std::is_sorted(truth.begin(), truth.end()));
    assert(std::is_sorted(result.begin(), result.end()));
    std::size_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < truth.size() && j < result.size()) {
        if (truth[i] < result[j])
            ++i;
        else if (result[j] < truth[i])
            ++j;
        else
            ++inter, ++i, ++j;
    }
    return f1_from_counts(truth.size(), result.size(), inter);
}

double workload_diff(const TrajectoryDatabase& db, const SimplifiedDatabase& view,
                     const QueryWorkload& workload) {
    if (workload.empty()) throw EmptyWorkload("workload_diff needs at least one query");
    double sum = 0.0;
    for (const RangeQuery& q : workload)
        sum += f1(range_query(db, q), range_query(view, q)).f1;
    return 1.0 - sum / double(workload.size());
}

RangeWorkloadTracker::RangeWorkloadTracker(const TrajectoryDatabase& db,
                                           const QueryWorkload& workload,
                                           const SimplifiedDatabase& initial)
    : trajectory_count_(db.trajectory_count()) {
    if (workload.empty()) throw EmptyWorkload("reward workload is empty");
    queries_.reserve(workload.size());
    for (const RangeQuery& q : workload) {
        PerQuery pq;
        pq.query = q;
        pq.in_truth.assign(trajectory_count_, 0);
        pq.in_result.assign(trajectory_count_, 0);
        for (std::uint32_t idx : range_query(db, q)) {
            pq.in_truth[idx] = 1;
            ++pq.truth_count;
        }
        for (std::uint32_t idx : range_query(initial, q)) {
            pq.in_result[idx] = 1;
            ++pq.result_count;
        }
        queries_.push_back(std::move(pq));
    }
}

void RangeWorkloadTracker::on_insert(std::size_t traj, const Point& p) {
    for (PerQuery& pq : queries_) {
        if (!pq.in_result[traj] && pq.query.contains(p)) {
            pq.in_result[traj] = 1;
            ++pq.result_count;
        }
    }
}

double RangeWorkloadTracker::diff() const {
    double sum = 0.0;
    // Kept points are a subset of the original, so the view's result is
    // contained in the truth and the intersection is the result itself.
    for (const PerQuery& pq : queries_)
        sum += f1_from_counts(pq.truth_count, pq.result_count, pq.result_count).f1;
    return 1.0 - sum / double(queries_.size());
}

} // namespace qdts
