#include "qdts/driver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <optional>

#include "qdts/errors.hpp"
#include "qdts/rng.hpp"

#include <json.hpp>

namespace qdts {

namespace {

constexpr int kCubeActions = 9;  // 8 children + stop
constexpr int kStopAction = 8;

std::array<std::uint8_t, 9> cube_mask(const Octree& octree, Octree::NodeRef node) {
    std::array<std::uint8_t, 9> mask{};
    for (int oct = 0; oct < 8; ++oct) {
        const Octree::NodeRef c = octree.child(node, oct);
        mask[oct] = (c != Octree::kNone && octree.uninserted_count(c) > 0) ? 1 : 0;
    }
    mask[kStopAction] = 1;
    return mask;
}

struct TraversalStep {
    std::array<double, 16> state;
    std::array<std::uint8_t, 9> mask;
    int action;
};

struct TraversalTrace {
    std::vector<TraversalStep> steps;
    std::array<double, 16> final_state{};
    std::array<std::uint8_t, 9> final_mask{};
    bool ended_by_stop = false;
};

using Selector =
    std::function<int(std::span<const double>, std::span<const std::uint8_t>)>;

Octree::NodeRef traverse_core(const Octree& octree, Octree::NodeRef start,
                              const Selector& select, TraversalTrace* trace) {
    Octree::NodeRef cur = start;
    while (true) {
        const std::array<double, 16> state = octree.cube_state(cur);
        const std::array<std::uint8_t, 9> mask = cube_mask(octree, cur);
        if (octree.level(cur) == octree.max_depth()) {
            if (trace) {
                trace->final_state = state;
                trace->final_mask = mask;
            }
            return cur;
        }
        const int action = select(state, mask);
        assert(action >= 0 && action < kCubeActions && mask[action]);
        if (trace) trace->steps.push_back(TraversalStep{state, mask, action});
        if (action == kStopAction) {
            if (trace) {
                trace->final_state = state;
                trace->final_mask = mask;
                trace->ended_by_stop = true;
            }
            return cur;
        }
        cur = octree.child(cur, action);
    }
}

Octree::NodeRef sample_start_with_fallback(const Octree& octree, int start_level,
                                           std::mt19937_64& rng) {
    for (int lvl = start_level; lvl >= 1; --lvl) {
        try {
            return sample_start_cube(octree, lvl, rng);
        } catch (const Exhausted&) {
            if (lvl == 1) throw;
        }
    }
    throw Exhausted("no candidate-bearing cube at any level");
}

void validate_config(const DriverConfig& cfg) {
    if (cfg.start_level < 1 || cfg.start_level > cfg.end_level)
        throw std::invalid_argument("driver config requires 1 <= S <= E");
    if (cfg.k_candidates < 1) throw std::invalid_argument("K must be at least 1");
    if (cfg.delta < 1) throw std::invalid_argument("delta must be at least 1");
}

} // namespace

Policies Policies::make(int k_candidates, std::uint64_t seed) {
    Policies p;
    p.cube = QNetwork(16, kCubeActions);
    p.point = QNetwork(2 * k_candidates, k_candidates);
    std::mt19937_64 rng(derive_seed(seed, 0xbeef));
    p.cube.init_random(rng);
    p.point.init_random(rng);
    return p;
}

void save_checkpoint(const Policies& policies, const DriverConfig& cfg,
                     const std::filesystem::path& path) {
    nlohmann::json j{{"format", "qdts-policy"},
                     {"version", 1},
                     {"config",
                      {{"start_level", cfg.start_level},
                       {"end_level", cfg.end_level},
                       {"k_candidates", cfg.k_candidates},
                       {"delta", cfg.delta},
                       {"reward_workload_size", cfg.reward_workload_size}}},
                     {"cube", policies.cube.to_json()},
                     {"point", policies.point.to_json()}};
    std::ofstream out(path);
    if (!out) throw MissingFile("cannot write checkpoint '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

Policies load_checkpoint(const std::filesystem::path& path, DriverConfig* cfg_out) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open checkpoint '" + path.string() + "'");
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "qdts-policy" || j.value("version", 0) != 1)
        throw ShapeMismatch("unrecognized checkpoint format in '" + path.string() + "'");

    Policies p;
    p.cube = QNetwork::from_json(j.at("cube"));
    p.point = QNetwork::from_json(j.at("point"));

    DriverConfig cfg;
    const auto& jc = j.at("config");
    cfg.start_level = jc.at("start_level").get<int>();
    cfg.end_level = jc.at("end_level").get<int>();
    cfg.k_candidates = jc.at("k_candidates").get<int>();
    cfg.delta = jc.at("delta").get<int>();
    cfg.reward_workload_size = jc.at("reward_workload_size").get<std::size_t>();

    if (p.cube.input_size() != 16 || p.cube.output_size() != kCubeActions)
        throw ShapeMismatch("cube network shape does not match the 16->9 contract");
    if (p.point.input_size() != 2 * cfg.k_candidates ||
        p.point.output_size() != cfg.k_candidates)
        throw ShapeMismatch("point network shape does not match K=" +
                            std::to_string(cfg.k_candidates));
    if (cfg_out) *cfg_out = cfg;
    return p;
}

Octree::NodeRef traverse_with(const Octree& octree, Octree::NodeRef start,
                              const Selector& select) {
    return traverse_core(octree, start, select, nullptr);
}

Octree::NodeRef agent_cube_traverse(const Octree& octree, const QNetwork& policy,
                                    Octree::NodeRef start, double epsilon,
                                    std::mt19937_64& rng) {
    return traverse_core(
        octree, start,
        [&](std::span<const double> state, std::span<const std::uint8_t> mask) {
            return select_action(policy, state, mask, epsilon, rng);
        },
        nullptr);
}

InsertedPoint agent_point_insert(Octree& octree, Octree::NodeRef cube,
                                 SimplifiedDatabase& view, const QNetwork& policy,
                                 int k, double epsilon, std::mt19937_64& rng) {
    const PointState state = build_point_state(octree, cube, view, k);
    const std::vector<double> features =
        point_state_features(state, octree.node_bounds(cube));
    const int slot = select_action(policy, features, state.valid, epsilon, rng);
    const auto [traj, point] = state.slots[slot];
    view.insert(traj, point);
    octree.mark_inserted(view.database().trajectory(traj).points[point]);
    return InsertedPoint{traj, point};
}

SimplifiedDatabase rl4qdts_simplify(const TrajectoryDatabase& db, std::size_t w,
                                    Octree& octree, const Policies& policies,
                                    const DriverConfig& cfg, std::uint64_t seed,
                                    double epsilon) {
    validate_config(cfg);
    const std::size_t m = db.trajectory_count();
    if (w < 2 * m)
        throw BudgetTooSmall("budget " + std::to_string(w) + " below 2M = " +
                             std::to_string(2 * m));

    SimplifiedDatabase view(db, w);
    octree.reset_uninserted();
    for (const Trajectory& t : db.trajectories()) {
        octree.mark_inserted(t.points.front());
        octree.mark_inserted(t.points.back());
    }

    const std::size_t target = std::min(w, db.point_count());
    std::mt19937_64 rng(seed);
    while (view.kept_count() < target) {
        const Octree::NodeRef start =
            sample_start_with_fallback(octree, cfg.start_level, rng);
        const Octree::NodeRef cube =
            agent_cube_traverse(octree, policies.cube, start, epsilon, rng);
        agent_point_insert(octree, cube, view, policies.point, cfg.k_candidates, epsilon,
                           rng);
    }
    return view;
}

namespace {

// A transition whose reward (window not yet closed) or next state (built
// on the following iteration) is still unknown.
struct StagedTransition {
    Transition t;
    int window = 0;
    bool has_next = false;
};

struct AgentBuffers {
    std::vector<StagedTransition> staged;
    std::optional<std::size_t> pending;  // index into staged awaiting next-state
};

void complete_pending(AgentBuffers& buf, std::span<const double> next_state,
                      std::span<const std::uint8_t> next_mask) {
    if (!buf.pending) return;
    StagedTransition& st = buf.staged[*buf.pending];
    st.t.next_state.assign(next_state.begin(), next_state.end());
    st.t.next_valid.assign(next_mask.begin(), next_mask.end());
    st.has_next = true;
    buf.pending.reset();
}

void finish_pending_terminal(AgentBuffers& buf) {
    if (!buf.pending) return;
    StagedTransition& st = buf.staged[*buf.pending];
    st.t.terminal = true;
    st.has_next = true;
    buf.pending.reset();
}

void flush_staged(AgentBuffers& buf, const std::vector<double>& window_rewards,
                  ReplayMemory& memory) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < buf.staged.size(); ++i) {
        StagedTransition& st = buf.staged[i];
        if (st.has_next && st.window < int(window_rewards.size())) {
            st.t.reward = window_rewards[st.window];
            memory.push(std::move(st.t));
        } else {
            if (buf.pending && *buf.pending == i) buf.pending = kept;
            if (kept != i) buf.staged[kept] = std::move(st);
            ++kept;
        }
    }
    buf.staged.resize(kept);
}

} // namespace

TrainResult train(const std::vector<TrajectoryDatabase>& databases,
                  const DriverConfig& driver_cfg, const DqnConfig& dqn_cfg,
                  const WorkloadSpec& workload_spec, const TrainOptions& options) {
    validate_config(driver_cfg);

    Policies policies = Policies::make(driver_cfg.k_candidates, options.seed);
    TrainResult result;
    result.policies = policies;  // 0 episodes: initial networks unchanged
    result.best_f1 = -1.0;

    QNetwork cube_target = policies.cube;
    QNetwork point_target = policies.point;
    AdamOptimizer cube_opt(policies.cube);
    AdamOptimizer point_opt(policies.point);
    ReplayMemory cube_memory(2000);
    ReplayMemory point_memory(2000);
    long cube_updates = 0, point_updates = 0;

    double epsilon = 1.0;
    std::mt19937_64 rng(derive_seed(options.seed, 0x747261696e));

    const auto run_updates = [&](QNetwork& net, QNetwork& target, AdamOptimizer& opt,
                                 ReplayMemory& memory, long& updates) {
        if (memory.size() < std::size_t(dqn_cfg.batch_size)) return;
        for (int u = 0; u < dqn_cfg.updates_per_window; ++u) {
            const auto batch = memory.sample(std::size_t(dqn_cfg.batch_size), rng);
            dqn_update(net, target, batch, dqn_cfg, opt);
            if (++updates % dqn_cfg.target_sync_interval == 0) target = net;
        }
    };

    for (std::size_t db_index = 0; db_index < databases.size(); ++db_index) {
        const TrajectoryDatabase& db = databases[db_index];
        const std::size_t m = db.trajectory_count();
        const std::size_t n = db.point_count();
        const std::size_t w = std::max<std::size_t>(
            2 * m, std::size_t(std::floor(options.budget_ratio * double(n))));

        for (int ep = 0; ep < options.episodes_per_database; ++ep) {
            WorkloadSpec spec = workload_spec;
            spec.count = driver_cfg.reward_workload_size;
            spec.seed = derive_seed(options.seed, db_index, std::uint64_t(ep), 0x776c);
            const QueryWorkload workload = generate(db, spec);

            Octree octree(db, workload, driver_cfg.end_level);
            SimplifiedDatabase view(db, w);
            octree.reset_uninserted();
            for (const Trajectory& t : db.trajectories()) {
                octree.mark_inserted(t.points.front());
                octree.mark_inserted(t.points.back());
            }
            RangeWorkloadTracker tracker(db, workload, view);
            double diff_before = tracker.diff();

            EpisodeStats stats;
            stats.initial_diff = diff_before;

            AgentBuffers cube_buf, point_buf;
            std::vector<double> window_rewards;

            const std::size_t target = std::min(w, n);
            std::size_t insertions = 0;

            const auto close_window = [&]() {
                const double diff_after = tracker.diff();
                window_rewards.push_back(compute_reward(diff_before, diff_after));
                diff_before = diff_after;
                flush_staged(cube_buf, window_rewards, cube_memory);
                flush_staged(point_buf, window_rewards, point_memory);
                run_updates(policies.cube, cube_target, cube_opt, cube_memory,
                            cube_updates);
                run_updates(policies.point, point_target, point_opt, point_memory,
                            point_updates);
            };

            while (view.kept_count() < target) {
                const int window = int(insertions) / driver_cfg.delta;
                const Octree::NodeRef start =
                    sample_start_with_fallback(octree, driver_cfg.start_level, rng);

                TraversalTrace trace;
                const Octree::NodeRef cube = traverse_core(
                    octree, start,
                    [&](std::span<const double> s, std::span<const std::uint8_t> mk) {
                        return select_action(policies.cube, s, mk, epsilon, rng);
                    },
                    &trace);

                if (!trace.steps.empty())
                    complete_pending(cube_buf, trace.steps.front().state,
                                     trace.steps.front().mask);
                else
                    complete_pending(cube_buf, trace.final_state, trace.final_mask);

                for (std::size_t j = 0; j < trace.steps.size(); ++j) {
                    StagedTransition st;
                    st.t.state.assign(trace.steps[j].state.begin(),
                                      trace.steps[j].state.end());
                    st.t.action = trace.steps[j].action;
                    st.window = window;
                    if (j + 1 < trace.steps.size()) {
                        st.t.next_state.assign(trace.steps[j + 1].state.begin(),
                                               trace.steps[j + 1].state.end());
                        st.t.next_valid.assign(trace.steps[j + 1].mask.begin(),
                                               trace.steps[j + 1].mask.end());
                        st.has_next = true;
                        cube_buf.staged.push_back(std::move(st));
                    } else if (!trace.ended_by_stop) {
                        // Forced return at the depth cap: the next state is
                        // the arrival node's.
                        st.t.next_state.assign(trace.final_state.begin(),
                                               trace.final_state.end());
                        st.t.next_valid.assign(trace.final_mask.begin(),
                                               trace.final_mask.end());
                        st.has_next = true;
                        cube_buf.staged.push_back(std::move(st));
                    } else {
                        // The stop transition leads to the next iteration's
                        // start-cube state.
                        cube_buf.staged.push_back(std::move(st));
                        cube_buf.pending = cube_buf.staged.size() - 1;
                    }
                }

                const PointState pstate =
                    build_point_state(octree, cube, view, driver_cfg.k_candidates);
                const std::vector<double> features =
                    point_state_features(pstate, octree.node_bounds(cube));
                complete_pending(point_buf, features, pstate.valid);

                const int slot =
                    select_action(policies.point, features, pstate.valid, epsilon, rng);
                const auto [traj, point] = pstate.slots[slot];
                view.insert(traj, point);
                const Point& inserted = db.trajectory(traj).points[point];
                octree.mark_inserted(inserted);
                tracker.on_insert(traj, inserted);

                StagedTransition pt;
                pt.t.state = features;
                pt.t.action = slot;
                pt.window = window;
                point_buf.staged.push_back(std::move(pt));
                point_buf.pending = point_buf.staged.size() - 1;

                ++insertions;
                if (insertions % std::size_t(driver_cfg.delta) == 0) close_window();
            }

            finish_pending_terminal(cube_buf);
            finish_pending_terminal(point_buf);
            if (insertions % std::size_t(driver_cfg.delta) != 0 || insertions == 0) {
                if (insertions > 0) close_window();
            }
            // Anything still staged belongs to the last closed window.
            flush_staged(cube_buf, window_rewards, cube_memory);
            flush_staged(point_buf, window_rewards, point_memory);

            stats.final_diff = tracker.diff();
            stats.window_rewards = std::move(window_rewards);
            stats.f1 = 1.0 - stats.final_diff;
            if (stats.f1 > result.best_f1) {
                result.best_f1 = stats.f1;
                result.policies = policies;
            }
            result.episodes.push_back(std::move(stats));
            epsilon = std::max(dqn_cfg.epsilon_min, epsilon * dqn_cfg.epsilon_decay);
        }
    }
    return result;
}

} // namespace qdts
