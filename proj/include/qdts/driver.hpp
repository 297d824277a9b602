#pragma once

#include <filesystem>
#include <functional>
#include <random>
#include <vector>

#include "qdts/agents.hpp"
#include "qdts/octree.hpp"
#include "qdts/workload.hpp"

namespace qdts {

struct DriverConfig {
    int start_level = 9;   // S
    int end_level = 12;    // E
    int k_candidates = 2;  // K
    int delta = 50;        // insertions per reward window during training
    std::size_t reward_workload_size = 100;
};

struct Policies {
    QNetwork cube;   // 16 -> 9
    QNetwork point;  // 2K -> K

    static Policies make(int k_candidates, std::uint64_t seed);
};

void save_checkpoint(const Policies& policies, const DriverConfig& cfg,
                     const std::filesystem::path& path);
Policies load_checkpoint(const std::filesystem::path& path,
                         DriverConfig* cfg_out = nullptr);

/// Scripted-traversal core: walk from `start`, asking `select` for an
/// action over (cube state, valid mask) until it stops, reaches the
/// maximum depth or runs out of explorable children. Actions 0..7 pick a
/// child, 8 stops.
Octree::NodeRef
traverse_with(const Octree& octree, Octree::NodeRef start,
              const std::function<int(std::span<const double>,
                                      std::span<const std::uint8_t>)>& select);

/// Agent-Cube traversal under an epsilon-greedy policy. `start` must
/// hold at least one uninserted candidate.
Octree::NodeRef agent_cube_traverse(const Octree& octree, const QNetwork& policy,
                                    Octree::NodeRef start, double epsilon,
                                    std::mt19937_64& rng);

struct InsertedPoint {
    std::uint32_t traj = 0;
    std::uint32_t point = 0;
};

/// Agent-Point step: build the point state for `cube`, pick a slot and
/// insert that candidate into the view, updating the octree counters.
InsertedPoint agent_point_insert(Octree& octree, Octree::NodeRef cube,
                                 SimplifiedDatabase& view, const QNetwork& policy,
                                 int k, double epsilon, std::mt19937_64& rng);

/// End-to-end simplification: endpoints first, then one point per
/// iteration through start-cube sampling, Agent-Cube and Agent-Point,
/// until min(W, N) points are kept. Greedy at epsilon 0 (inference);
/// epsilon 1 gives the uniform-random insertion policy.
SimplifiedDatabase rl4qdts_simplify(const TrajectoryDatabase& db, std::size_t w,
                                    Octree& octree, const Policies& policies,
                                    const DriverConfig& cfg, std::uint64_t seed,
                                    double epsilon = 0.0);

struct TrainOptions {
    int episodes_per_database = 5;
    double budget_ratio = 0.02;  // training budget W as a fraction of N
    std::uint64_t seed = 0;
};

struct EpisodeStats {
    double initial_diff = 0.0;  // workload diff of the endpoints-only view
    double final_diff = 0.0;
    std::vector<double> window_rewards;
    double f1 = 0.0;  // training-workload F1 at episode end
};

struct TrainResult {
    Policies policies;  // best-by-training-F1 checkpoint
    double best_f1 = 0.0;
    std::vector<EpisodeStats> episodes;
};

/// Episode-based DQN training over the given databases. Each episode
/// regenerates the reward workload (fresh seed), rebuilds the octree
/// statistics and runs one epsilon-greedy simplification; every
/// cfg.delta insertions the workload diff is evaluated and the shared
/// reward is assigned to the window's transitions of both agents.
/// Deterministic: a fixed seed yields bit-identical policies.
TrainResult train(const std::vector<TrajectoryDatabase>& databases,
                  const DriverConfig& driver_cfg, const DqnConfig& dqn_cfg,
                  const WorkloadSpec& workload_spec, const TrainOptions& options);

} // namespace qdts
