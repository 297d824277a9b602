#include "qdts/agents.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>

#include "qdts/error_measures.hpp"
#include "qdts/errors.hpp"

namespace qdts {

PointValue point_values(const Trajectory& t, std::span<const std::uint32_t> kept,
                        std::uint32_t point_index) {
    const auto [s_j, s_j1] = anchor_segment(kept, point_index);
    const Point& a = t.points[s_j];
    const Point& b = t.points[s_j1];
    const Point& p = t.points[point_index];

    PointValue v;
    v.v_s = point_error(ErrorMeasure::Sed, a, b, p);

    // Time of the spatially closest position on the anchor segment.
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len_sq = dx * dx + dy * dy;
    double tau = 0.0;
    if (len_sq > 0.0)
        tau = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq, 0.0, 1.0);
    const double t_closest = a.t + tau * (b.t - a.t);
    v.v_t = std::abs(p.t - t_closest);
    return v;
}

BestCandidate best_candidate(const Trajectory& t, std::span<const std::uint32_t> kept,
                             std::span<const std::uint32_t> candidates) {
    if (candidates.empty()) throw NoCandidates("trajectory has no candidate in the cube");
    BestCandidate best;
    best.value.v_s = -1.0;
    for (std::uint32_t c : candidates) {
        const PointValue v = point_values(t, kept, c);
        if (v.v_s > best.value.v_s) best = BestCandidate{c, v};
    }
    return best;
}

PointState build_point_state(const Octree& octree, Octree::NodeRef cube,
                             const SimplifiedDatabase& view, int k) {
    assert(k >= 1);
    const TrajectoryDatabase& db = view.database();

    // Best candidate per trajectory; std::map keeps trajectory order
    // deterministic before the value sort.
    std::map<std::uint32_t, BestCandidate> best;
    octree.for_each_uninserted_point(cube, [&](const Octree::PointEntry& e) {
        const Trajectory& t = db.trajectory(e.traj);
        if (e.index == 0 || e.index + 1 == t.points.size()) return;  // endpoints
        if (view.is_kept(e.traj, e.index)) return;
        const PointValue v = point_values(t, view.kept(e.traj), e.index);
        auto [it, fresh] = best.emplace(e.traj, BestCandidate{e.index, v});
        if (!fresh && v.v_s > it->second.value.v_s) it->second = BestCandidate{e.index, v};
    });
    if (best.empty()) throw CubeExhausted("cube has no uninserted candidate");

    std::vector<std::pair<std::uint32_t, BestCandidate>> ranked(best.begin(), best.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second.value.v_s > b.second.value.v_s;
    });

    PointState state;
    state.values.assign(std::size_t(2) * k, 0.0);
    state.slots.assign(k, PointState::Slot{});
    state.valid.assign(k, 0);
    for (int slot = 0; slot < k && slot < int(ranked.size()); ++slot) {
        state.values[2 * slot] = ranked[slot].second.value.v_s;
        state.values[2 * slot + 1] = ranked[slot].second.value.v_t;
        state.slots[slot] = PointState::Slot{ranked[slot].first, ranked[slot].second.point};
        state.valid[slot] = 1;
    }
    return state;
}

std::vector<double> point_state_features(const PointState& state, const Box& cube) {
    const double dx = cube.x_extent();
    const double dy = cube.y_extent();
    const double diag = std::sqrt(dx * dx + dy * dy);
    const double s_scale = diag > 0.0 ? diag : 1.0;
    const double t_scale = cube.t_extent() > 0.0 ? cube.t_extent() : 1.0;

    std::vector<double> features(state.values.size(), 0.0);
    for (std::size_t slot = 0; slot * 2 < state.values.size(); ++slot) {
        if (!state.valid[slot]) continue;
        features[2 * slot] = state.values[2 * slot] / s_scale;
        features[2 * slot + 1] = state.values[2 * slot + 1] / t_scale;
    }
    return features;
}

int select_action(const QNetwork& net, std::span<const double> state,
                  std::span<const std::uint8_t> valid, double epsilon,
                  std::mt19937_64& rng) {
    int valid_count = 0;
    for (std::uint8_t v : valid) valid_count += v ? 1 : 0;
    if (valid_count == 0) throw NoValidAction("action mask is all-invalid");

    if (epsilon > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < epsilon) {
            std::uniform_int_distribution<int> pick(0, valid_count - 1);
            int remaining = pick(rng);
            for (std::size_t a = 0; a < valid.size(); ++a) {
                if (!valid[a]) continue;
                if (remaining == 0) return int(a);
                --remaining;
            }
        }
    }

    const std::vector<double> q = net.forward(state);
    if (q.size() != valid.size())
        throw ShapeMismatch("mask arity does not match network output");
    int best = -1;
    for (std::size_t a = 0; a < q.size(); ++a) {
        if (!valid[a]) continue;
        if (best < 0 || q[a] > q[best]) best = int(a);
    }
    return best;
}

double dqn_update(QNetwork& net, const QNetwork& target,
                  std::span<const Transition* const> batch, const DqnConfig& cfg,
                  AdamOptimizer& optimizer) {
    assert(!batch.empty());
    QNetwork::Gradients grad = net.zero_gradients();
    double loss_sum = 0.0;
    for (const Transition* t : batch) {
        double y = t->reward;
        if (!t->terminal) {
            const std::vector<double> q_next = target.forward(t->next_state);
            double best = 0.0;
            bool found = false;
            for (std::size_t a = 0; a < q_next.size(); ++a) {
                if (a < t->next_valid.size() && !t->next_valid[a]) continue;
                if (!found || q_next[a] > best) {
                    best = q_next[a];
                    found = true;
                }
            }
            if (found) y += cfg.gamma * best;
        }
        loss_sum += net.accumulate_td_gradient(t->state, t->action, y, grad);
    }
    const double scale = 1.0 / double(batch.size());
    for (double& g : grad.w1) g *= scale;
    for (double& g : grad.b1) g *= scale;
    for (double& g : grad.w2) g *= scale;
    for (double& g : grad.b2) g *= scale;
    optimizer.step(net, grad, cfg.learning_rate);
    return loss_sum * scale;
}

} // namespace qdts
