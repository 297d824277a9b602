#include "qdts/baselines.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>

#include "qdts/errors.hpp"

namespace qdts {

std::string BaselineSpec::name() const {
    std::string out = algorithm == BaselineAlgorithm::TopDown ? "topdown" : "bottomup";
    out += adaptation == Adaptation::PerTrajectory ? "-e" : "-w";
    return out;
}

BaselineSpec parse_baseline(std::string_view algo, std::string_view measure) {
    BaselineSpec spec;
    spec.measure = parse_measure(measure);
    if (algo == "topdown-e")
        spec = {BaselineAlgorithm::TopDown, spec.measure, Adaptation::PerTrajectory};
    else if (algo == "topdown-w")
        spec = {BaselineAlgorithm::TopDown, spec.measure, Adaptation::WholeDatabase};
    else if (algo == "bottomup-e")
        spec = {BaselineAlgorithm::BottomUp, spec.measure, Adaptation::PerTrajectory};
    else if (algo == "bottomup-w")
        spec = {BaselineAlgorithm::BottomUp, spec.measure, Adaptation::WholeDatabase};
    else
        throw std::invalid_argument("unknown baseline '" + std::string(algo) + "'");
    return spec;
}

namespace {

// Interior point of (lo, hi) with the largest error against the anchor
// lo->hi; ties at the smallest index. Returns hi when the segment has no
// interior.
struct Champion {
    std::uint32_t point;
    double error;
};

Champion segment_champion(const Trajectory& t, ErrorMeasure m, std::uint32_t lo,
                          std::uint32_t hi) {
    Champion best{hi, -1.0};
    const Point& ps = t.points[lo];
    const Point& pe = t.points[hi];
    for (std::uint32_t i = lo + 1; i < hi; ++i) {
        const double err = point_error(m, ps, pe, t.points[i], &t.points[i + 1]);
        if (err > best.error) best = Champion{i, err};
    }
    return best;
}

struct TopDownEntry {
    double error;
    std::uint32_t traj;
    std::uint32_t point;
    std::uint32_t lo, hi;
};

struct TopDownOrder {
    // max-heap on error; ties prefer the smaller point index, then the
    // smaller trajectory index, for fully deterministic output.
    bool operator()(const TopDownEntry& a, const TopDownEntry& b) const {
        if (a.error != b.error) return a.error < b.error;
        if (a.traj != b.traj) return a.traj > b.traj;
        return a.point > b.point;
    }
};

struct BottomUpEntry {
    double error;
    std::uint32_t traj;
    std::uint32_t point;
    std::uint32_t left, right;  // kept neighbors when the entry was pushed
};

struct BottomUpOrder {
    // min-heap on error; ties prefer the smaller point index.
    bool operator()(const BottomUpEntry& a, const BottomUpEntry& b) const {
        if (a.error != b.error) return a.error > b.error;
        if (a.traj != b.traj) return a.traj > b.traj;
        return a.point > b.point;
    }
};

std::vector<std::uint32_t> all_indices(std::size_t n) {
    std::vector<std::uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint32_t>(i);
    return out;
}

// Shared top-down loop. `targets` gives each trajectory its kept-size
// goal; the queue is global, so a single-trajectory call and the W
// adaptation use the same machinery.
std::vector<std::vector<std::uint32_t>>
top_down_run(const TrajectoryDatabase* db, const Trajectory* single, ErrorMeasure m,
             const std::vector<std::size_t>& targets) {
    const std::size_t m_count = single ? 1 : db->trajectory_count();
    const auto traj_of = [&](std::uint32_t i) -> const Trajectory& {
        return single ? *single : db->trajectory(i);
    };

    std::vector<std::vector<char>> kept(m_count);
    std::vector<std::size_t> sizes(m_count, 2);
    std::priority_queue<TopDownEntry, std::vector<TopDownEntry>, TopDownOrder> heap;

    const auto push_segment = [&](std::uint32_t ti, std::uint32_t lo, std::uint32_t hi) {
        if (hi - lo < 2) return;
        const Champion c = segment_champion(traj_of(ti), m, lo, hi);
        heap.push(TopDownEntry{c.error, ti, c.point, lo, hi});
    };

    for (std::uint32_t ti = 0; ti < m_count; ++ti) {
        const std::size_t n = traj_of(ti).size();
        kept[ti].assign(n, 0);
        kept[ti][0] = 1;
        kept[ti][n - 1] = 1;
        if (targets[ti] > 2) push_segment(ti, 0, static_cast<std::uint32_t>(n - 1));
    }

    while (!heap.empty()) {
        const TopDownEntry e = heap.top();
        heap.pop();
        if (sizes[e.traj] >= targets[e.traj]) continue;
        kept[e.traj][e.point] = 1;
        sizes[e.traj] += 1;
        if (sizes[e.traj] < targets[e.traj]) {
            push_segment(e.traj, e.lo, e.point);
            push_segment(e.traj, e.point, e.hi);
        }
    }

    std::vector<std::vector<std::uint32_t>> out(m_count);
    for (std::uint32_t ti = 0; ti < m_count; ++ti)
        for (std::uint32_t i = 0; i < kept[ti].size(); ++i)
            if (kept[ti][i]) out[ti].push_back(i);
    return out;
}

} // namespace

std::size_t per_trajectory_budget(double r, std::size_t n) {
    const double raw = std::floor(r * double(n));
    return std::max<std::size_t>(2, raw < 0 ? 0 : std::size_t(raw));
}

std::vector<std::uint32_t> top_down_trajectory(const Trajectory& t, std::size_t budget,
                                               ErrorMeasure measure) {
    assert(budget >= 2);
    if (budget >= t.size()) return all_indices(t.size());
    const std::vector<std::size_t> targets{budget};
    return top_down_run(nullptr, &t, measure, targets)[0];
}

std::vector<std::uint32_t> bottom_up_trajectory(const Trajectory& t, std::size_t budget,
                                                ErrorMeasure measure) {
    assert(budget >= 2);
    const std::size_t n = t.size();
    if (budget >= n) return all_indices(n);

    std::vector<std::uint32_t> prev(n), next(n);
    std::vector<char> alive(n, 1);
    for (std::uint32_t i = 0; i < n; ++i) {
        prev[i] = i == 0 ? i : i - 1;
        next[i] = i + 1 == n ? i : i + 1;
    }

    std::priority_queue<BottomUpEntry, std::vector<BottomUpEntry>, BottomUpOrder> heap;
    const auto push_point = [&](std::uint32_t i) {
        const double err =
            point_error(measure, t.points[prev[i]], t.points[next[i]], t.points[i],
                        &t.points[i + 1]);
        heap.push(BottomUpEntry{err, 0, i, prev[i], next[i]});
    };
    for (std::uint32_t i = 1; i + 1 < n; ++i) push_point(i);

    std::size_t remaining = n;
    const std::size_t target = std::max<std::size_t>(budget, 2);
    while (remaining > target) {
        const BottomUpEntry e = heap.top();
        heap.pop();
        if (!alive[e.point] || prev[e.point] != e.left || next[e.point] != e.right)
            continue;  // stale
        alive[e.point] = 0;
        next[e.left] = e.right;
        prev[e.right] = e.left;
        remaining -= 1;
        if (e.left > 0) push_point(e.left);
        if (e.right + 1 < n) push_point(e.right);
    }

    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < n; ++i)
        if (alive[i]) out.push_back(i);
    return out;
}

SimplifiedDatabase adapt_per_trajectory(const TrajectoryDatabase& db, std::size_t w,
                                        BaselineAlgorithm algorithm, ErrorMeasure measure) {
    const std::size_t m = db.trajectory_count();
    if (w < 2 * m)
        throw BudgetTooSmall("budget " + std::to_string(w) + " below 2M = " +
                             std::to_string(2 * m));
    const double r = double(w) / double(db.point_count());

    std::vector<std::size_t> targets(m);
    std::size_t total = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t n = db.trajectory(i).size();
        targets[i] = std::min(n, per_trajectory_budget(r, n));
        total += targets[i];
    }
    // Endpoint minimums can overshoot the global budget; shave the
    // largest targets first until it holds.
    while (total > w) {
        std::size_t best = m;
        for (std::size_t i = 0; i < m; ++i)
            if (targets[i] > 2 && (best == m || targets[i] > targets[best])) best = i;
        assert(best < m);
        targets[best] -= 1;
        total -= 1;
    }

    std::vector<std::vector<std::uint32_t>> kept(m);
    for (std::size_t i = 0; i < m; ++i)
        kept[i] = algorithm == BaselineAlgorithm::TopDown
                      ? top_down_trajectory(db.trajectory(i), targets[i], measure)
                      : bottom_up_trajectory(db.trajectory(i), targets[i], measure);
    return SimplifiedDatabase::from_kept_sets(db, std::move(kept), w);
}

SimplifiedDatabase adapt_whole_database(const TrajectoryDatabase& db, std::size_t w,
                                        BaselineAlgorithm algorithm, ErrorMeasure measure) {
    const std::size_t m = db.trajectory_count();
    const std::size_t n_total = db.point_count();
    if (w < 2 * m)
        throw BudgetTooSmall("budget " + std::to_string(w) + " below 2M = " +
                             std::to_string(2 * m));
    const std::size_t target_total = std::min(w, n_total);

    if (algorithm == BaselineAlgorithm::TopDown) {
        // One queue across trajectories: grant the globally largest
        // insertion until the total budget is met.
        std::vector<std::vector<char>> kept(m);
        std::size_t total = 2 * m;
        std::priority_queue<TopDownEntry, std::vector<TopDownEntry>, TopDownOrder> heap;
        const auto push_segment = [&](std::uint32_t ti, std::uint32_t lo, std::uint32_t hi) {
            if (hi - lo < 2) return;
            const Champion c = segment_champion(db.trajectory(ti), measure, lo, hi);
            heap.push(TopDownEntry{c.error, ti, c.point, lo, hi});
        };
        for (std::uint32_t ti = 0; ti < m; ++ti) {
            const std::size_t n = db.trajectory(ti).size();
            kept[ti].assign(n, 0);
            kept[ti][0] = 1;
            kept[ti][n - 1] = 1;
            push_segment(ti, 0, static_cast<std::uint32_t>(n - 1));
        }
        while (total < target_total) {
            assert(!heap.empty());
            const TopDownEntry e = heap.top();
            heap.pop();
            kept[e.traj][e.point] = 1;
            total += 1;
            push_segment(e.traj, e.lo, e.point);
            push_segment(e.traj, e.point, e.hi);
        }
        std::vector<std::vector<std::uint32_t>> out(m);
        for (std::uint32_t ti = 0; ti < m; ++ti)
            for (std::uint32_t i = 0; i < kept[ti].size(); ++i)
                if (kept[ti][i]) out[ti].push_back(i);
        return SimplifiedDatabase::from_kept_sets(db, std::move(out), w);
    }

    // Bottom-up: drop the globally cheapest interior point until the
    // total fits. Stale heap entries are skipped lazily.
    std::vector<std::vector<std::uint32_t>> prev(m), next(m);
    std::vector<std::vector<char>> alive(m);
    std::priority_queue<BottomUpEntry, std::vector<BottomUpEntry>, BottomUpOrder> heap;
    const auto push_point = [&](std::uint32_t ti, std::uint32_t i) {
        const Trajectory& t = db.trajectory(ti);
        const double err = point_error(measure, t.points[prev[ti][i]],
                                       t.points[next[ti][i]], t.points[i],
                                       &t.points[i + 1]);
        heap.push(BottomUpEntry{err, ti, i, prev[ti][i], next[ti][i]});
    };
    for (std::uint32_t ti = 0; ti < m; ++ti) {
        const std::size_t n = db.trajectory(ti).size();
        prev[ti].resize(n);
        next[ti].resize(n);
        alive[ti].assign(n, 1);
        for (std::uint32_t i = 0; i < n; ++i) {
            prev[ti][i] = i == 0 ? i : i - 1;
            next[ti][i] = i + 1 == n ? i : i + 1;
        }
        for (std::uint32_t i = 1; i + 1 < n; ++i) push_point(ti, i);
    }
    std::size_t total = n_total;
    while (total > target_total) {
        assert(!heap.empty());
        const BottomUpEntry e = heap.top();
        heap.pop();
        if (!alive[e.traj][e.point] || prev[e.traj][e.point] != e.left ||
            next[e.traj][e.point] != e.right)
            continue;
        alive[e.traj][e.point] = 0;
        next[e.traj][e.left] = e.right;
        prev[e.traj][e.right] = e.left;
        total -= 1;
        if (e.left > 0) push_point(e.traj, e.left);
        if (e.right + 1 < db.trajectory(e.traj).size()) push_point(e.traj, e.right);
    }
    std::vector<std::vector<std::uint32_t>> out(m);
    for (std::uint32_t ti = 0; ti < m; ++ti)
        for (std::uint32_t i = 0; i < alive[ti].size(); ++i)
            if (alive[ti][i]) out[ti].push_back(i);
    return SimplifiedDatabase::from_kept_sets(db, std::move(out), w);
}

SimplifiedDatabase run_baseline(const TrajectoryDatabase& db, std::size_t w,
                                const BaselineSpec& spec) {
    return spec.adaptation == Adaptation::PerTrajectory
               ? adapt_per_trajectory(db, w, spec.algorithm, spec.measure)
               : adapt_whole_database(db, w, spec.algorithm, spec.measure);
}

} // namespace qdts
