#include "qdts/trajectory.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "qdts/errors.hpp"

namespace qdts {

TrajectoryDatabase::TrajectoryDatabase(std::vector<Trajectory> trajectories)
    : trajectories_(std::move(trajectories)) {
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    double t_min = x_min, t_max = -x_min;

    for (std::size_t i = 0; i < trajectories_.size(); ++i) {
        const Trajectory& t = trajectories_[i];
        if (t.points.size() < 2)
            throw TrajectoryTooShort("trajectory '" + t.id + "' has " +
                                     std::to_string(t.points.size()) + " point(s)");
        if (!index_.emplace(t.id, i).second)
            throw DuplicateTrajectoryId("duplicate trajectory id '" + t.id + "'");
        double prev_t = -std::numeric_limits<double>::infinity();
        for (const Point& p : t.points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t))
                throw MalformedRow("non-finite coordinate in trajectory '" + t.id + "'");
            if (p.t <= prev_t)
                throw NonIncreasingTimestamp("trajectory '" + t.id +
                                             "' has non-increasing timestamp " +
                                             std::to_string(p.t));
            prev_t = p.t;
            x_min = std::min(x_min, p.x);
            x_max = std::max(x_max, p.x);
            y_min = std::min(y_min, p.y);
            y_max = std::max(y_max, p.y);
            t_min = std::min(t_min, p.t);
            t_max = std::max(t_max, p.t);
        }
        point_count_ += t.points.size();
    }
    if (point_count_ > 0) bounds_ = Box{x_min, x_max, y_min, y_max, t_min, t_max};
}

std::optional<std::size_t> TrajectoryDatabase::index_of(std::string_view id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::pair<std::uint32_t, std::uint32_t>
anchor_segment(std::span<const std::uint32_t> kept, std::uint32_t i) {
    assert(kept.size() >= 2 && kept.front() == 0);
    assert(i <= kept.back());
    auto it = std::upper_bound(kept.begin(), kept.end(), i);
    if (it == kept.end()) {
        // i is the last point; it belongs to the final segment.
        return {kept[kept.size() - 2], kept.back()};
    }
    return {*(it - 1), *it};
}

SimplifiedDatabase::SimplifiedDatabase(const TrajectoryDatabase& db, std::size_t budget)
    : db_(&db), budget_(budget) {
    kept_.resize(db.trajectory_count());
    kept_flags_.resize(db.trajectory_count());
    for (std::size_t i = 0; i < db.trajectory_count(); ++i) {
        const std::size_t n = db.trajectory(i).size();
        kept_[i] = {0, static_cast<std::uint32_t>(n - 1)};
        kept_flags_[i].assign(n, 0);
        kept_flags_[i][0] = 1;
        kept_flags_[i][n - 1] = 1;
        kept_count_ += 2;
    }
}

SimplifiedDatabase
SimplifiedDatabase::from_kept_sets(const TrajectoryDatabase& db,
                                   std::vector<std::vector<std::uint32_t>> kept,
                                   std::size_t budget) {
    if (kept.size() != db.trajectory_count())
        throw std::invalid_argument("kept sets do not match the database");
    SimplifiedDatabase view;
    view.db_ = &db;
    view.budget_ = budget;
    view.kept_ = std::move(kept);
    view.kept_flags_.resize(db.trajectory_count());
    for (std::size_t i = 0; i < db.trajectory_count(); ++i) {
        const std::size_t n = db.trajectory(i).size();
        const auto& k = view.kept_[i];
        if (k.empty() || k.front() != 0 || k.back() != n - 1 ||
            !std::is_sorted(k.begin(), k.end()) ||
            std::adjacent_find(k.begin(), k.end()) != k.end())
            throw std::invalid_argument("invalid kept set for trajectory '" +
                                        db.trajectory(i).id + "'");
        view.kept_flags_[i].assign(n, 0);
        for (std::uint32_t idx : k) view.kept_flags_[i][idx] = 1;
        view.kept_count_ += k.size();
    }
    return view;
}

void SimplifiedDatabase::insert(std::size_t traj, std::uint32_t idx) {
    assert(traj < kept_.size());
    assert(idx < db_->trajectory(traj).size());
    if (kept_flags_[traj][idx]) return;
    auto& k = kept_[traj];
    k.insert(std::upper_bound(k.begin(), k.end(), idx), idx);
    kept_flags_[traj][idx] = 1;
    ++kept_count_;
    check_invariants();
}

void SimplifiedDatabase::check_invariants() const {
#ifndef NDEBUG
    for (std::size_t i = 0; i < kept_.size(); ++i) {
        assert(!kept_[i].empty());
        assert(kept_[i].front() == 0);
        assert(kept_[i].back() == db_->trajectory(i).size() - 1);
    }
#endif
}

} // namespace qdts
