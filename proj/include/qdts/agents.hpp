#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "qdts/octree.hpp"
#include "qdts/qnet.hpp"
#include "qdts/replay.hpp"
#include "qdts/trajectory.hpp"

namespace qdts {

struct DqnConfig {
    double gamma = 0.99;
    double learning_rate = 0.01;
    double epsilon_min = 0.1;
    double epsilon_decay = 0.99;  // applied per episode
    int batch_size = 32;
    int delta = 50;               // insertions per reward window
    int target_sync_interval = 100;
    int updates_per_window = 8;
};

/// Spatial/temporal deviation of a candidate point from its anchor
/// segment: v_s is the synchronized Euclidean distance, v_t the time gap
/// to the spatially closest position on the anchor.
struct PointValue {
    double v_s = 0.0;
    double v_t = 0.0;
};

PointValue point_values(const Trajectory& t, std::span<const std::uint32_t> kept,
                        std::uint32_t point_index);

/// The candidate of one trajectory maximizing v_s (ties at the smallest
/// index) among `candidates`, which must be uninserted interior points.
struct BestCandidate {
    std::uint32_t point = 0;
    PointValue value;
};
BestCandidate best_candidate(const Trajectory& t, std::span<const std::uint32_t> kept,
                             std::span<const std::uint32_t> candidates);

/// Agent-Point observation: per-slot raw (v_s, v_t) pairs in descending
/// v_s order with the candidate each slot denotes. Slots beyond the
/// available trajectories are zero and masked invalid.
struct PointState {
    std::vector<double> values;  // 2K raw values
    struct Slot {
        std::uint32_t traj = 0;
        std::uint32_t point = 0;
    };
    std::vector<Slot> slots;            // K entries
    std::vector<std::uint8_t> valid;    // K entries
};

/// Builds the Agent-Point state for a cube: per-trajectory best
/// candidates among the cube's uninserted interior points, the K
/// largest by v_s. Throws CubeExhausted when the cube has no candidate.
PointState build_point_state(const Octree& octree, Octree::NodeRef cube,
                             const SimplifiedDatabase& view, int k);

/// Network input for a point state: v_s scaled by the cube's spatial
/// diagonal and v_t by its temporal extent, keeping the observation
/// within the well-conditioned range of the tanh layer.
std::vector<double> point_state_features(const PointState& state, const Box& cube);

/// Epsilon-greedy over the valid actions; greedy ties break at the
/// smallest index. Throws NoValidAction on an all-invalid mask.
int select_action(const QNetwork& net, std::span<const double> state,
                  std::span<const std::uint8_t> valid, double epsilon,
                  std::mt19937_64& rng);

inline double compute_reward(double diff_before, double diff_after) {
    return diff_before - diff_after;
}

/// One DQN step: TD targets from the target network restricted to each
/// transition's valid next actions (y = r on terminal transitions),
/// mean squared-error gradient over the batch, one Adam update.
/// Returns the mean loss.
double dqn_update(QNetwork& net, const QNetwork& target,
                  std::span<const Transition* const> batch, const DqnConfig& cfg,
                  AdamOptimizer& optimizer);

} // namespace qdts
