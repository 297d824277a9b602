#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qdts/baselines.hpp"
#include "qdts/driver.hpp"
#include "qdts/queries.hpp"
#include "qdts/workload.hpp"

namespace qdts {

enum class QueryTask { Range, Knn, Similarity };

QueryTask parse_task(std::string_view name);
std::string_view to_string(QueryTask task);

struct QueryParams {
    std::size_t knn_k = 3;
    double edr_eps = 2000.0;
    double similarity_delta = 5000.0;
    double window_length = 7.0 * 86400;
    std::size_t trajectory_query_count = 20;  // kNN / similarity queries
};

struct AlgorithmSpec {
    enum class Kind { Rl4qdts, RandomInsertion, Baseline };
    Kind kind = Kind::Baseline;
    BaselineSpec baseline;

    std::string name() const;
    std::string measure_name() const;
    std::string adaptation_name() const;
};

/// Parse algorithm names: "rl4qdts", "random", or a baseline name like
/// "topdown-e" (measure applies to baselines only).
AlgorithmSpec parse_algorithm(std::string_view algo, std::string_view measure);

struct ExperimentSpec {
    std::vector<AlgorithmSpec> algorithms;
    std::vector<double> budget_ratios;  // fractions of N in (0, 1]
    std::vector<QueryTask> tasks;
    WorkloadSpec workload;  // evaluation ranges + RL inference statistics
    QueryParams query_params;
    int repetitions = 1;
    std::uint64_t seed = 0;
};

struct BenchRow {
    std::string algorithm;
    std::string measure;
    std::string adaptation;
    double budget_ratio = 0.0;
    std::string task;
    double f1_mean = 0.0;
    double f1_std = 0.0;
    double wallclock_s = 0.0;
};

/// Run every (algorithm, budget) cell of the experiment over a worker
/// pool. All randomness is derived from the spec seed per cell, so
/// results are reproducible regardless of scheduling; wallclock columns
/// are the only nondeterministic output.
std::vector<BenchRow> run_bench(const TrajectoryDatabase& db, const ExperimentSpec& spec,
                                const Policies* policies, const DriverConfig* rl_cfg,
                                int threads = 1);

void write_results_csv(std::span<const BenchRow> rows, const std::filesystem::path& path);
std::vector<BenchRow> load_results_csv(const std::filesystem::path& path);

struct TaskScore {
    QueryTask task = QueryTask::Range;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t evaluated = 0;  // queries scored (kNN may skip sparse windows)
};

/// Score an existing view against the original database: mean precision,
/// recall and F1 per task. Range queries come from the workload spec (or
/// an explicit workload); kNN/similarity queries sample database
/// trajectories from the seed. Enforces P = R = F1 on every kNN query.
std::vector<TaskScore> evaluate_view(const TrajectoryDatabase& db,
                                     const SimplifiedDatabase& view,
                                     std::span<const QueryTask> tasks,
                                     const WorkloadSpec& workload_spec,
                                     const QueryParams& query_params,
                                     std::uint64_t seed,
                                     const QueryWorkload* explicit_workload = nullptr);

struct SweepRow {
    std::string param;
    double value = 0.0;
    double f1_mean = 0.0;
    double f1_std = 0.0;
    double time_s = 0.0;
};

struct SweepSpec {
    std::string param;  // "start-level", "end-level", "k", "train-size"
    std::vector<double> values;
    DriverConfig driver;
    DqnConfig dqn;
    WorkloadSpec workload;
    double budget_ratio = 0.01;
    double train_fraction = 0.5;
    int train_databases = 4;
    int episodes_per_database = 3;
    int repetitions = 3;
    std::uint64_t seed = 0;
};

std::vector<SweepRow> run_sweep(const TrajectoryDatabase& db, const SweepSpec& spec);

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);
std::vector<SweepRow> load_sweep_csv(const std::filesystem::path& path);

/// Render the per-value summary, flagging the best row.
/// Throws MalformedResults when rows are empty or inconsistent.
std::string sweep_report(std::span<const SweepRow> rows);

} // namespace qdts
