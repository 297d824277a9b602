#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdts/bench.hpp"
#include "qdts/driver.hpp"
#include "qdts/errors.hpp"
#include "qdts/io.hpp"
#include "qdts/rng.hpp"
#include "qdts/synth.hpp"
#include "qdts/workload.hpp"

namespace {

using namespace qdts;

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 1;
constexpr int kExitMissingFile = 2;

struct WorkloadFlags {
    std::string distribution = "data";
    std::size_t count = 100;
    double spatial_extent = 2000.0;
    double temporal_extent = 7.0 * 86400;
    double mu = 0.5;
    double sigma = 0.25;
    double zipf_a = 4.0;
    std::string centers_file;

    void attach(CLI::App* cmd) {
        cmd->add_option("--workload-dist", distribution,
                        "query center distribution: data|gaussian|zipf|centers");
        cmd->add_option("--workload-count", count, "number of range queries");
        cmd->add_option("--query-extent", spatial_extent, "query side length (m)");
        cmd->add_option("--query-duration", temporal_extent, "query duration (s)");
        cmd->add_option("--gaussian-mu", mu, "gaussian center mean");
        cmd->add_option("--gaussian-sigma", sigma, "gaussian center stddev");
        cmd->add_option("--zipf-a", zipf_a, "zipf exponent");
        cmd->add_option("--centers", centers_file, "x,y,t CSV for the centers distribution");
    }

    WorkloadSpec spec(std::uint64_t seed) const {
        WorkloadSpec s;
        if (distribution != "centers") s.distribution = parse_distribution(distribution);
        s.count = count;
        s.spatial_extent = spatial_extent;
        s.temporal_extent = temporal_extent;
        s.gaussian_mu = mu;
        s.gaussian_sigma = sigma;
        s.zipf_a = zipf_a;
        s.seed = seed;
        return s;
    }

    QueryWorkload make(const TrajectoryDatabase& db, std::uint64_t seed) const {
        if (distribution == "centers") {
            if (centers_file.empty())
                throw std::invalid_argument("--centers is required with the centers distribution");
            return generate_from_centers(load_centers(centers_file), spec(seed));
        }
        return generate(db, spec(seed));
    }
};

struct DriverFlags {
    DriverConfig cfg;

    void attach(CLI::App* cmd) {
        cmd->add_option("--start-level", cfg.start_level, "octree start level S");
        cmd->add_option("--end-level", cfg.end_level, "octree end level E");
        cmd->add_option("-K,--candidates", cfg.k_candidates, "point-state slots K");
        cmd->add_option("--delta", cfg.delta, "insertions per reward window");
        cmd->add_option("--reward-queries", cfg.reward_workload_size,
                        "reward workload size");
    }
};

void require_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw MissingFile("no such file: " + path);
}

TrajectoryDatabase load_db(const std::string& path) {
    require_file(path);
    return load_trajectories(path);
}

std::size_t budget_from_ratio(const TrajectoryDatabase& db, double ratio) {
    if (ratio <= 0.0 || ratio > 1.0)
        throw std::invalid_argument("budget ratio must be in (0, 1]");
    return std::size_t(ratio * double(db.point_count()));
}

int run_cli(int argc, char** argv) {
    CLI::App app{"query-accuracy-driven trajectory database simplification"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a key=value file");

    // ---- ingest ----------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "validate and normalize a dataset CSV");
    std::string ingest_in, ingest_out;
    ingest->add_option("--input", ingest_in, "input CSV (x/y or lat/lon)")->required();
    ingest->add_option("--output", ingest_out, "normalized output CSV")->required();

    // ---- train -----------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "train the two policies");
    std::vector<std::string> train_data;
    std::string train_out = "policy.json";
    int train_episodes = 5;
    double train_budget_ratio = 0.02;
    std::uint64_t train_seed = 0;
    DriverFlags train_driver;
    WorkloadFlags train_workload;
    DqnConfig dqn;
    train_cmd->add_option("--data", train_data, "training database CSVs")->required();
    train_cmd->add_option("--out", train_out, "checkpoint output path");
    train_cmd->add_option("--episodes", train_episodes, "episodes per database");
    train_cmd->add_option("--budget-ratio", train_budget_ratio, "training budget fraction");
    train_cmd->add_option("--seed", train_seed, "root seed");
    train_cmd->add_option("--lr", dqn.learning_rate, "Adam learning rate");
    train_cmd->add_option("--gamma", dqn.gamma, "discount rate");
    train_cmd->add_option("--batch-size", dqn.batch_size, "DQN batch size");
    train_cmd->add_option("--epsilon-min", dqn.epsilon_min, "minimal epsilon");
    train_cmd->add_option("--epsilon-decay", dqn.epsilon_decay, "epsilon decay per episode");
    train_cmd->add_option("--updates-per-window", dqn.updates_per_window,
                          "DQN updates per reward window");
    train_driver.attach(train_cmd);
    train_workload.attach(train_cmd);

    // ---- simplify --------------------------------------------------
    auto* simplify = app.add_subcommand("simplify", "produce a kept-index CSV");
    std::string sim_data, sim_algo = "rl4qdts", sim_measure = "sed", sim_out = "kept.csv";
    std::string sim_checkpoint;
    double sim_budget = 0.01;
    std::uint64_t sim_seed = 0;
    WorkloadFlags sim_workload;
    simplify->add_option("--data", sim_data, "dataset CSV")->required();
    simplify->add_option("--algo", sim_algo,
                         "rl4qdts | random | topdown-e | topdown-w | bottomup-e | bottomup-w");
    simplify->add_option("--measure", sim_measure, "sed | ped | dad | sad");
    simplify->add_option("--budget", sim_budget, "storage budget as a fraction of N");
    simplify->add_option("--out", sim_out, "kept-index CSV output");
    simplify->add_option("--checkpoint", sim_checkpoint, "policy checkpoint (rl algorithms)");
    simplify->add_option("--seed", sim_seed, "start-cube sampling seed");
    sim_workload.attach(simplify);

    // ---- query -----------------------------------------------------
    auto* query = app.add_subcommand("query", "score a simplified view against the original");
    std::string q_data, q_kept, q_task = "range", q_workload_file;
    QueryParams q_params;
    std::uint64_t q_seed = 0;
    WorkloadFlags q_workload;
    query->add_option("--data", q_data, "dataset CSV")->required();
    query->add_option("--kept", q_kept, "kept-index CSV")->required();
    query->add_option("--task", q_task, "range | knn | similarity | all");
    query->add_option("--workload-file", q_workload_file, "explicit range workload CSV");
    query->add_option("-k", q_params.knn_k, "kNN k");
    query->add_option("--edr-eps", q_params.edr_eps, "EDR matching threshold (m)");
    query->add_option("--sim-delta", q_params.similarity_delta, "similarity threshold (m)");
    query->add_option("--window", q_params.window_length, "kNN/similarity window (s)");
    query->add_option("--queries", q_params.trajectory_query_count,
                      "number of kNN/similarity queries");
    query->add_option("--seed", q_seed, "query sampling seed");
    q_workload.attach(query);

    // ---- bench -----------------------------------------------------
    auto* bench = app.add_subcommand("bench", "run an experiment grid, emit results CSV");
    std::string b_data, b_out = "results.csv", b_checkpoint;
    std::vector<std::string> b_algos{"rl4qdts", "topdown-e", "bottomup-e"};
    std::vector<std::string> b_measures{"sed"};
    std::vector<double> b_budgets{0.005, 0.01, 0.02};
    std::vector<std::string> b_tasks{"range"};
    int b_reps = 5, b_threads = 4;
    std::uint64_t b_seed = 0;
    QueryParams b_params;
    WorkloadFlags b_workload;
    bench->add_option("--data", b_data, "dataset CSV")->required();
    bench->add_option("--out", b_out, "results CSV path");
    bench->add_option("--algos", b_algos, "algorithms to compare");
    bench->add_option("--measures", b_measures, "error measures for the baselines");
    bench->add_option("--budgets", b_budgets, "budget ratios");
    bench->add_option("--tasks", b_tasks, "query tasks");
    bench->add_option("--reps", b_reps, "repetitions per cell");
    bench->add_option("--threads", b_threads, "worker pool size");
    bench->add_option("--seed", b_seed, "root seed");
    bench->add_option("--checkpoint", b_checkpoint, "policy checkpoint for rl algorithms");
    bench->add_option("-k", b_params.knn_k, "kNN k");
    bench->add_option("--edr-eps", b_params.edr_eps, "EDR matching threshold (m)");
    bench->add_option("--sim-delta", b_params.similarity_delta, "similarity threshold (m)");
    bench->add_option("--window", b_params.window_length, "kNN/similarity window (s)");
    bench->add_option("--queries", b_params.trajectory_query_count,
                      "number of kNN/similarity queries");
    b_workload.attach(bench);

    // ---- sweep -----------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "parameter study (train + evaluate per value)");
    std::string s_data, s_param = "k", s_out = "sweep.csv", s_from;
    std::vector<double> s_values;
    SweepSpec s_spec;
    WorkloadFlags s_workload;
    DriverFlags s_driver;
    sweep->add_option("--data", s_data, "dataset CSV");
    sweep->add_option("--param", s_param, "start-level | end-level | k | train-size");
    sweep->add_option("--values", s_values, "parameter values");
    sweep->add_option("--out", s_out, "sweep CSV path");
    sweep->add_option("--from", s_from, "summarize an existing sweep CSV instead");
    sweep->add_option("--budget-ratio", s_spec.budget_ratio, "evaluation budget fraction");
    sweep->add_option("--train-databases", s_spec.train_databases, "training database count");
    sweep->add_option("--episodes", s_spec.episodes_per_database, "episodes per database");
    sweep->add_option("--reps", s_spec.repetitions, "evaluation repetitions");
    sweep->add_option("--seed", s_spec.seed, "root seed");
    s_driver.attach(sweep);
    s_workload.attach(sweep);

    CLI11_PARSE(app, argc, argv);

    if (ingest->parsed()) {
        require_file(ingest_in);
        const TrajectoryDatabase db = load_trajectories(ingest_in);
        save_trajectories(db, ingest_out);
        std::printf("ingested %zu trajectories, %zu points -> %s\n", db.trajectory_count(),
                    db.point_count(), ingest_out.c_str());
        return kExitOk;
    }

    if (train_cmd->parsed()) {
        std::vector<TrajectoryDatabase> dbs;
        for (const std::string& path : train_data) dbs.push_back(load_db(path));
        TrainOptions options;
        options.episodes_per_database = train_episodes;
        options.budget_ratio = train_budget_ratio;
        options.seed = train_seed;
        const TrainResult result = train(dbs, train_driver.cfg, dqn,
                                         train_workload.spec(train_seed), options);
        save_checkpoint(result.policies, train_driver.cfg, train_out);
        std::printf("trained %zu episodes, best training F1 %.4f -> %s\n",
                    result.episodes.size(), result.best_f1, train_out.c_str());
        return kExitOk;
    }

    if (simplify->parsed()) {
        const TrajectoryDatabase db = load_db(sim_data);
        const std::size_t w =
            std::max(2 * db.trajectory_count(), budget_from_ratio(db, sim_budget));
        SimplifiedDatabase view = [&]() -> SimplifiedDatabase {
            if (sim_algo == "rl4qdts" || sim_algo == "random") {
                if (sim_checkpoint.empty())
                    throw std::invalid_argument("--checkpoint is required for " + sim_algo);
                require_file(sim_checkpoint);
                DriverConfig cfg;
                const Policies policies = load_checkpoint(sim_checkpoint, &cfg);
                WorkloadFlags wf = sim_workload;
                wf.count = cfg.reward_workload_size;
                Octree octree(db, wf.make(db, derive_seed(sim_seed, 0x696e66)),
                              cfg.end_level);
                return rl4qdts_simplify(db, w, octree, policies, cfg, sim_seed,
                                        sim_algo == "random" ? 1.0 : 0.0);
            }
            return run_baseline(db, w, parse_baseline(sim_algo, sim_measure));
        }();
        save_kept(view, sim_out);
        std::printf("kept %zu of %zu points (budget %zu) -> %s\n", view.kept_count(),
                    db.point_count(), w, sim_out.c_str());
        return kExitOk;
    }

    if (query->parsed()) {
        const TrajectoryDatabase db = load_db(q_data);
        require_file(q_kept);
        const SimplifiedDatabase view = load_kept(db, q_kept);
        std::vector<QueryTask> tasks;
        if (q_task == "all")
            tasks = {QueryTask::Range, QueryTask::Knn, QueryTask::Similarity};
        else
            tasks = {parse_task(q_task)};
        std::optional<QueryWorkload> explicit_wl;
        if (!q_workload_file.empty()) {
            require_file(q_workload_file);
            explicit_wl = load_workload(q_workload_file);
        }
        const auto scores =
            evaluate_view(db, view, tasks, q_workload.spec(q_seed), q_params, q_seed,
                          explicit_wl ? &*explicit_wl : nullptr);
        for (const TaskScore& s : scores)
            std::printf("%-10s P=%.4f R=%.4f F1=%.4f (%zu queries)\n",
                        std::string(to_string(s.task)).c_str(), s.precision, s.recall,
                        s.f1, s.evaluated);
        return kExitOk;
    }

    if (bench->parsed()) {
        const TrajectoryDatabase db = load_db(b_data);
        ExperimentSpec spec;
        for (const std::string& algo : b_algos) {
            if (algo == "rl4qdts" || algo == "random") {
                spec.algorithms.push_back(parse_algorithm(algo, ""));
            } else {
                for (const std::string& measure : b_measures)
                    spec.algorithms.push_back(parse_algorithm(algo, measure));
            }
        }
        spec.budget_ratios = b_budgets;
        for (const std::string& t : b_tasks) spec.tasks.push_back(parse_task(t));
        spec.workload = b_workload.spec(b_seed);
        spec.query_params = b_params;
        spec.repetitions = b_reps;
        spec.seed = b_seed;

        std::optional<Policies> policies;
        DriverConfig cfg;
        const bool has_rl = !b_checkpoint.empty();
        if (has_rl) {
            require_file(b_checkpoint);
            policies = load_checkpoint(b_checkpoint, &cfg);
        }
        const auto rows = run_bench(db, spec, policies ? &*policies : nullptr,
                                    has_rl ? &cfg : nullptr, b_threads);
        write_results_csv(rows, b_out);
        std::printf("wrote %zu result rows -> %s\n", rows.size(), b_out.c_str());
        return kExitOk;
    }

    if (sweep->parsed()) {
        if (!s_from.empty()) {
            require_file(s_from);
            const auto rows = load_sweep_csv(s_from);
            std::fputs(sweep_report(rows).c_str(), stdout);
            return kExitOk;
        }
        if (s_data.empty() || s_values.empty())
            throw std::invalid_argument("sweep needs --data and --values (or --from)");
        const TrajectoryDatabase db = load_db(s_data);
        s_spec.param = s_param;
        s_spec.values = s_values;
        s_spec.driver = s_driver.cfg;
        s_spec.workload = s_workload.spec(s_spec.seed);
        const auto rows = run_sweep(db, s_spec);
        write_sweep_csv(rows, s_out);
        std::fputs(sweep_report(rows).c_str(), stdout);
        std::printf("wrote %zu sweep rows -> %s\n", rows.size(), s_out.c_str());
        return kExitOk;
    }

    return kExitBadConfig;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const qdts::MissingFile& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitMissingFile;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadConfig;
    }
}
