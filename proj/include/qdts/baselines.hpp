#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdts/error_measures.hpp"
#include "qdts/trajectory.hpp"

namespace qdts {

enum class BaselineAlgorithm { TopDown, BottomUp };

/// How a per-trajectory simplifier is applied to a database: each
/// trajectory separately with a proportional budget, or the database as
/// a whole through one global priority queue.
enum class Adaptation { PerTrajectory, WholeDatabase };

struct BaselineSpec {
    BaselineAlgorithm algorithm = BaselineAlgorithm::TopDown;
    ErrorMeasure measure = ErrorMeasure::Sed;
    Adaptation adaptation = Adaptation::PerTrajectory;

    std::string name() const;
};

/// Parse names like "topdown-e" / "bottomup-w" (measure set separately).
BaselineSpec parse_baseline(std::string_view algo, std::string_view measure);

/// Budgeted Douglas-Peucker: grow from the endpoints, repeatedly keeping
/// the interior point with the largest error against its current anchor
/// segment. Ties break at the smallest index. Returns the sorted kept
/// set of size min(budget, n).
std::vector<std::uint32_t> top_down_trajectory(const Trajectory& t, std::size_t budget,
                                               ErrorMeasure measure);

/// Reverse strategy: start from all points and repeatedly drop the
/// interior point whose error against the segment joining its current
/// kept neighbors is smallest, down to max(budget, 2) points.
std::vector<std::uint32_t> bottom_up_trajectory(const Trajectory& t, std::size_t budget,
                                                ErrorMeasure measure);

/// Per-trajectory budget under compression ratio r: max(2, floor(r*n)).
std::size_t per_trajectory_budget(double r, std::size_t n);

/// "E" adaptation: simplify each trajectory with its proportional
/// budget. Total kept is at most W (budgets are trimmed from the
/// largest when endpoint minimums would overshoot).
SimplifiedDatabase adapt_per_trajectory(const TrajectoryDatabase& db, std::size_t w,
                                        BaselineAlgorithm algorithm, ErrorMeasure measure);

/// "W" adaptation: one global priority queue across all trajectories;
/// output size is exactly min(W, N).
SimplifiedDatabase adapt_whole_database(const TrajectoryDatabase& db, std::size_t w,
                                        BaselineAlgorithm algorithm, ErrorMeasure measure);

SimplifiedDatabase run_baseline(const TrajectoryDatabase& db, std::size_t w,
                                const BaselineSpec& spec);

} // namespace qdts
