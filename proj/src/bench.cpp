#include "qdts/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "qdts/errors.hpp"
#include "qdts/rng.hpp"

namespace qdts {

QueryTask parse_task(std::string_view name) {
    if (name == "range") return QueryTask::Range;
    if (name == "knn") return QueryTask::Knn;
    if (name == "similarity") return QueryTask::Similarity;
    throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

std::string_view to_string(QueryTask task) {
    switch (task) {
        case QueryTask::Range: return "range";
        case QueryTask::Knn: return "knn";
        case QueryTask::Similarity: return "similarity";
    }
    return "?";
}

std::string AlgorithmSpec::name() const {
    switch (kind) {
        case Kind::Rl4qdts: return "rl4qdts";
        case Kind::RandomInsertion: return "random";
        case Kind::Baseline: return baseline.name();
    }
    return "?";
}

std::string AlgorithmSpec::measure_name() const {
    return kind == Kind::Baseline ? std::string(to_string(baseline.measure)) : "-";
}

std::string AlgorithmSpec::adaptation_name() const {
    if (kind != Kind::Baseline) return "-";
    return baseline.adaptation == Adaptation::PerTrajectory ? "e" : "w";
}

AlgorithmSpec parse_algorithm(std::string_view algo, std::string_view measure) {
    AlgorithmSpec spec;
    if (algo == "rl4qdts") {
        spec.kind = AlgorithmSpec::Kind::Rl4qdts;
    } else if (algo == "random") {
        spec.kind = AlgorithmSpec::Kind::RandomInsertion;
    } else {
        spec.kind = AlgorithmSpec::Kind::Baseline;
        spec.baseline = parse_baseline(algo, measure);
    }
    return spec;
}

namespace {

struct TrajectoryQuery {
    std::uint32_t traj;
    TimeWindow window;
};

// Shared ground truth for one bench run.
struct EvalContext {
    QueryWorkload range_workload;
    std::vector<QueryResult> range_truth;
    std::vector<TrajectoryQuery> traj_queries;
    std::vector<QueryResult> knn_truth;      // empty entries: skipped query
    std::vector<QueryResult> sim_truth;
};

EvalContext build_eval_context(const TrajectoryDatabase& db, const ExperimentSpec& spec) {
    EvalContext ctx;
    WorkloadSpec wl = spec.workload;
    wl.seed = derive_seed(spec.seed, 0x6576616c);
    ctx.range_workload = generate(db, wl);
    ctx.range_truth.reserve(ctx.range_workload.size());
    for (const RangeQuery& q : ctx.range_workload) ctx.range_truth.push_back(range_query(db, q));

    const bool needs_traj = std::any_of(spec.tasks.begin(), spec.tasks.end(), [](QueryTask t) {
        return t != QueryTask::Range;
    });
    if (!needs_traj) return ctx;

    std::mt19937_64 rng(derive_seed(spec.seed, 0x7471));
    std::uniform_int_distribution<std::uint32_t> pick(
        0, std::uint32_t(db.trajectory_count() - 1));
    for (std::size_t i = 0; i < spec.query_params.trajectory_query_count; ++i) {
        const std::uint32_t ti = pick(rng);
        const Trajectory& t = db.trajectory(ti);
        const double mid = 0.5 * (t.points.front().t + t.points.back().t);
        const double half = 0.5 * spec.query_params.window_length;
        ctx.traj_queries.push_back(TrajectoryQuery{ti, TimeWindow{mid - half, mid + half}});
    }
    for (const TrajectoryQuery& q : ctx.traj_queries) {
        const Trajectory& t = db.trajectory(q.traj);
        try {
            ctx.knn_truth.push_back(
                knn_query(db, t, q.window, spec.query_params.knn_k, spec.query_params.edr_eps));
        } catch (const InsufficientCandidates&) {
            ctx.knn_truth.emplace_back();
        }
        ctx.sim_truth.push_back(
            similarity_query(db, t, q.window, spec.query_params.similarity_delta));
    }
    return ctx;
}

double eval_task(const TrajectoryDatabase& db, const SimplifiedDatabase& view,
                 const EvalContext& ctx, QueryTask task, const QueryParams& qp) {
    double sum = 0.0;
    std::size_t count = 0;
    switch (task) {
        case QueryTask::Range:
            for (std::size_t i = 0; i < ctx.range_workload.size(); ++i) {
                sum += f1(ctx.range_truth[i], range_query(view, ctx.range_workload[i])).f1;
                ++count;
            }
            break;
        case QueryTask::Knn:
            for (std::size_t i = 0; i < ctx.traj_queries.size(); ++i) {
                if (ctx.knn_truth[i].empty()) continue;  // skipped at truth time
                const Trajectory& t = db.trajectory(ctx.traj_queries[i].traj);
                QueryResult rs;
                try {
                    rs = knn_query(view, t, ctx.traj_queries[i].window, qp.knn_k, qp.edr_eps);
                } catch (const InsufficientCandidates&) {
                    continue;
                }
                const F1Score s = f1(ctx.knn_truth[i], rs);
                // |R_o| = |R_s| = k forces P = R = F1.
                assert(s.precision == s.recall && s.recall == s.f1);
                sum += s.f1;
                ++count;
            }
            break;
        case QueryTask::Similarity:
            for (std::size_t i = 0; i < ctx.traj_queries.size(); ++i) {
                const Trajectory& t = db.trajectory(ctx.traj_queries[i].traj);
                sum += f1(ctx.sim_truth[i],
                          similarity_query(view, t, ctx.traj_queries[i].window,
                                           qp.similarity_delta))
                           .f1;
                ++count;
            }
            break;
    }
    return count == 0 ? 1.0 : sum / double(count);
}

struct CellResult {
    std::vector<std::vector<double>> task_f1;  // [task][repetition]
    double mean_seconds = 0.0;
};

} // namespace

std::vector<BenchRow> run_bench(const TrajectoryDatabase& db, const ExperimentSpec& spec,
                                const Policies* policies, const DriverConfig* rl_cfg,
                                int threads) {
    const bool has_rl =
        std::any_of(spec.algorithms.begin(), spec.algorithms.end(), [](const auto& a) {
            return a.kind != AlgorithmSpec::Kind::Baseline;
        });
    if (has_rl && (policies == nullptr || rl_cfg == nullptr))
        throw std::invalid_argument("rl4qdts algorithms need a checkpoint");

    const EvalContext ctx = build_eval_context(db, spec);

    // Inference statistics follow the evaluation distribution but use a
    // fresh sample: the simplifier never sees the evaluated queries.
    QueryWorkload inference_workload;
    std::optional<Octree> rl_octree;
    if (has_rl) {
        WorkloadSpec wl = spec.workload;
        wl.count = rl_cfg->reward_workload_size;
        wl.seed = derive_seed(spec.seed, 0x696e66);
        inference_workload = generate(db, wl);
        rl_octree.emplace(db, inference_workload, rl_cfg->end_level);
    }

    struct Cell {
        std::size_t algo;
        std::size_t budget;
    };
    std::vector<Cell> cells;
    for (std::size_t a = 0; a < spec.algorithms.size(); ++a)
        for (std::size_t b = 0; b < spec.budget_ratios.size(); ++b)
            cells.push_back(Cell{a, b});

    std::vector<CellResult> results(cells.size());
    std::atomic<std::size_t> next_cell{0};

    const auto run_cell = [&](std::size_t cell_index, Octree* octree) {
        const Cell& cell = cells[cell_index];
        const AlgorithmSpec& algo = spec.algorithms[cell.algo];
        const double ratio = spec.budget_ratios[cell.budget];
        const std::size_t w = std::max<std::size_t>(
            2 * db.trajectory_count(),
            std::size_t(std::floor(ratio * double(db.point_count()))));

        CellResult out;
        out.task_f1.assign(spec.tasks.size(), {});
        const int reps =
            algo.kind == AlgorithmSpec::Kind::Baseline ? 1 : spec.repetitions;
        double seconds = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            const std::uint64_t run_seed =
                derive_seed(spec.seed, cell.algo, cell.budget, std::uint64_t(rep));
            const auto start = std::chrono::steady_clock::now();
            SimplifiedDatabase view = [&] {
                switch (algo.kind) {
                    case AlgorithmSpec::Kind::Baseline:
                        return run_baseline(db, w, algo.baseline);
                    case AlgorithmSpec::Kind::Rl4qdts:
                        return rl4qdts_simplify(db, w, *octree, *policies, *rl_cfg,
                                                run_seed, 0.0);
                    case AlgorithmSpec::Kind::RandomInsertion:
                        return rl4qdts_simplify(db, w, *octree, *policies, *rl_cfg,
                                                run_seed, 1.0);
                }
                throw std::logic_error("unreachable");
            }();
            seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                     start)
                           .count();
            for (std::size_t t = 0; t < spec.tasks.size(); ++t)
                out.task_f1[t].push_back(
                    eval_task(db, view, ctx, spec.tasks[t], spec.query_params));
        }
        // Deterministic repetitions share one measurement but report the
        // full repetition count.
        if (algo.kind == AlgorithmSpec::Kind::Baseline && spec.repetitions > 1)
            for (auto& v : out.task_f1) v.assign(std::size_t(spec.repetitions), v[0]);
        out.mean_seconds = seconds / double(reps);
        results[cell_index] = std::move(out);
    };

    const int pool = std::max(1, threads);
    if (pool == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            run_cell(i, rl_octree ? &*rl_octree : nullptr);
    } else {
        // The RL octree's uninserted counters are single-writer, so each
        // worker gets its own copy.
        std::vector<std::thread> workers;
        for (int wi = 0; wi < pool; ++wi) {
            workers.emplace_back([&] {
                std::optional<Octree> local = rl_octree;
                while (true) {
                    const std::size_t i = next_cell.fetch_add(1);
                    if (i >= cells.size()) break;
                    run_cell(i, local ? &*local : nullptr);
                }
            });
        }
        for (std::thread& t : workers) t.join();
    }

    std::vector<BenchRow> rows;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const AlgorithmSpec& algo = spec.algorithms[cells[i].algo];
        for (std::size_t t = 0; t < spec.tasks.size(); ++t) {
            const std::vector<double>& samples = results[i].task_f1[t];
            const bool all_equal =
                std::all_of(samples.begin(), samples.end(),
                            [&](double v) { return v == samples.front(); });
            double mean = samples.front();
            double stddev = 0.0;
            if (!all_equal) {
                mean = 0.0;
                for (double v : samples) mean += v;
                mean /= double(samples.size());
                double var = 0.0;
                for (double v : samples) var += (v - mean) * (v - mean);
                stddev = std::sqrt(var / double(samples.size() - 1));
            }
            rows.push_back(BenchRow{algo.name(), algo.measure_name(),
                                    algo.adaptation_name(),
                                    spec.budget_ratios[cells[i].budget],
                                    std::string(to_string(spec.tasks[t])), mean, stddev,
                                    results[i].mean_seconds});
        }
    }
    return rows;
}

std::vector<TaskScore> evaluate_view(const TrajectoryDatabase& db,
                                     const SimplifiedDatabase& view,
                                     std::span<const QueryTask> tasks,
                                     const WorkloadSpec& workload_spec,
                                     const QueryParams& query_params,
                                     std::uint64_t seed,
                                     const QueryWorkload* explicit_workload) {
    ExperimentSpec spec;
    spec.tasks.assign(tasks.begin(), tasks.end());
    spec.workload = workload_spec;
    spec.query_params = query_params;
    spec.seed = seed;
    EvalContext ctx = build_eval_context(db, spec);
    if (explicit_workload) {
        ctx.range_workload = *explicit_workload;
        ctx.range_truth.clear();
        for (const RangeQuery& q : ctx.range_workload)
            ctx.range_truth.push_back(range_query(db, q));
    }

    std::vector<TaskScore> out;
    for (QueryTask task : tasks) {
        TaskScore score;
        score.task = task;
        double p = 0.0, r = 0.0, f = 0.0;
        std::size_t count = 0;
        const auto add = [&](const F1Score& s) {
            p += s.precision;
            r += s.recall;
            f += s.f1;
            ++count;
        };
        switch (task) {
            case QueryTask::Range:
                for (std::size_t i = 0; i < ctx.range_workload.size(); ++i)
                    add(f1(ctx.range_truth[i], range_query(view, ctx.range_workload[i])));
                break;
            case QueryTask::Knn:
                for (std::size_t i = 0; i < ctx.traj_queries.size(); ++i) {
                    if (ctx.knn_truth[i].empty()) continue;
                    const Trajectory& t = db.trajectory(ctx.traj_queries[i].traj);
                    QueryResult rs;
                    try {
                        rs = knn_query(view, t, ctx.traj_queries[i].window,
                                       query_params.knn_k, query_params.edr_eps);
                    } catch (const InsufficientCandidates&) {
                        continue;
                    }
                    const F1Score s = f1(ctx.knn_truth[i], rs);
                    if (s.precision != s.recall || s.recall != s.f1)
                        throw std::logic_error("knn metric identity violated");
                    add(s);
                }
                break;
            case QueryTask::Similarity:
                for (std::size_t i = 0; i < ctx.traj_queries.size(); ++i) {
                    const Trajectory& t = db.trajectory(ctx.traj_queries[i].traj);
                    add(f1(ctx.sim_truth[i],
                           similarity_query(view, t, ctx.traj_queries[i].window,
                                            query_params.similarity_delta)));
                }
                break;
        }
        score.evaluated = count;
        if (count > 0) {
            score.precision = p / double(count);
            score.recall = r / double(count);
            score.f1 = f / double(count);
        }
        out.push_back(score);
    }
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_field(const std::string& s, const char* what) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw MalformedResults("bad " + std::string(what) + " '" + s + "'");
    return v;
}

} // namespace

void write_results_csv(std::span<const BenchRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MissingFile("cannot write '" + path.string() + "'");
    out << "algorithm,measure,adaptation,budget_ratio,task,f1_mean,f1_std,wallclock_s\n";
    for (const BenchRow& r : rows)
        out << r.algorithm << ',' << r.measure << ',' << r.adaptation << ','
            << r.budget_ratio << ',' << r.task << ',' << r.f1_mean << ',' << r.f1_std
            << ',' << r.wallclock_s << '\n';
}

std::vector<BenchRow> load_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) ||
        line != "algorithm,measure,adaptation,budget_ratio,task,f1_mean,f1_std,wallclock_s")
        throw MalformedResults("unrecognized results header");
    std::vector<BenchRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 8) throw MalformedResults("expected 8 fields: '" + line + "'");
        rows.push_back(BenchRow{f[0], f[1], f[2], parse_field(f[3], "budget_ratio"), f[4],
                                parse_field(f[5], "f1_mean"), parse_field(f[6], "f1_std"),
                                parse_field(f[7], "wallclock_s")});
    }
    return rows;
}

std::vector<SweepRow> run_sweep(const TrajectoryDatabase& db, const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("sweep needs parameter values");

    // Seeded split: a training pool carved into equal databases and a
    // held-out evaluation database.
    std::mt19937_64 rng(derive_seed(spec.seed, 0x73706c6974));
    std::vector<std::size_t> order(db.trajectory_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t train_total =
        std::max<std::size_t>(std::size_t(spec.train_fraction * double(order.size())),
                              std::size_t(spec.train_databases));

    const auto make_db = [&](std::size_t begin, std::size_t end) {
        std::vector<Trajectory> ts;
        for (std::size_t i = begin; i < end && i < order.size(); ++i)
            ts.push_back(db.trajectory(order[i]));
        return TrajectoryDatabase(std::move(ts));
    };

    std::vector<SweepRow> rows;
    for (double value : spec.values) {
        DriverConfig driver = spec.driver;
        int train_db_count = spec.train_databases;
        if (spec.param == "start-level")
            driver.start_level = int(value);
        else if (spec.param == "end-level")
            driver.end_level = int(value);
        else if (spec.param == "k")
            driver.k_candidates = int(value);
        else if (spec.param == "train-size")
            train_db_count = std::max(1, int(value));
        else
            throw std::invalid_argument("unknown sweep parameter '" + spec.param + "'");

        std::vector<TrajectoryDatabase> train_dbs;
        const std::size_t per_db = std::max<std::size_t>(1, train_total / train_db_count);
        for (int d = 0; d < train_db_count; ++d)
            train_dbs.push_back(make_db(d * per_db, (d + 1) * per_db));
        TrajectoryDatabase eval_db = make_db(train_total, order.size());

        TrainOptions opt;
        opt.episodes_per_database = spec.episodes_per_database;
        opt.budget_ratio = std::max(spec.budget_ratio, 0.02);
        opt.seed = derive_seed(spec.seed, std::uint64_t(value * 1000), 0x7472);
        const TrainResult trained =
            train(train_dbs, driver, spec.dqn, spec.workload, opt);

        WorkloadSpec eval_wl = spec.workload;
        eval_wl.seed = derive_seed(spec.seed, 0x6576);
        const QueryWorkload eval_workload = generate(eval_db, eval_wl);
        WorkloadSpec inf_wl = spec.workload;
        inf_wl.count = driver.reward_workload_size;
        inf_wl.seed = derive_seed(spec.seed, 0x696e);
        Octree octree(eval_db, generate(eval_db, inf_wl), driver.end_level);

        const std::size_t w = std::max<std::size_t>(
            2 * eval_db.trajectory_count(),
            std::size_t(std::floor(spec.budget_ratio * double(eval_db.point_count()))));

        std::vector<double> f1s;
        const auto start = std::chrono::steady_clock::now();
        for (int rep = 0; rep < spec.repetitions; ++rep) {
            SimplifiedDatabase view =
                rl4qdts_simplify(eval_db, w, octree, trained.policies, driver,
                                 derive_seed(spec.seed, std::uint64_t(value * 1000),
                                             std::uint64_t(rep)),
                                 0.0);
            f1s.push_back(1.0 - workload_diff(eval_db, view, eval_workload));
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        double mean = 0.0;
        for (double v : f1s) mean += v;
        mean /= double(f1s.size());
        double var = 0.0;
        for (double v : f1s) var += (v - mean) * (v - mean);
        const double stddev =
            f1s.size() > 1 ? std::sqrt(var / double(f1s.size() - 1)) : 0.0;
        rows.push_back(SweepRow{spec.param, value, mean, stddev,
                                elapsed / double(spec.repetitions)});
    }
    return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MissingFile("cannot write '" + path.string() + "'");
    out << "param,value,f1_mean,f1_std,time_s\n";
    for (const SweepRow& r : rows)
        out << r.param << ',' << r.value << ',' << r.f1_mean << ',' << r.f1_std << ','
            << r.time_s << '\n';
}

std::vector<SweepRow> load_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "param,value,f1_mean,f1_std,time_s")
        throw MalformedResults("unrecognized sweep header");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 5) throw MalformedResults("expected 5 fields: '" + line + "'");
        rows.push_back(SweepRow{f[0], parse_field(f[1], "value"),
                                parse_field(f[2], "f1_mean"), parse_field(f[3], "f1_std"),
                                parse_field(f[4], "time_s")});
    }
    return rows;
}

std::string sweep_report(std::span<const SweepRow> rows) {
    if (rows.empty()) throw MalformedResults("no sweep rows");
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].f1_mean > rows[best].f1_mean) best = i;

    std::ostringstream out;
    out << "param      value      f1 (mean+/-std)      time_s\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-10s %-10.4g %.4f +/- %.4f     %-10.3f%s\n",
                      rows[i].param.c_str(), rows[i].value, rows[i].f1_mean,
                      rows[i].f1_std, rows[i].time_s, i == best ? "  <- best" : "");
        out << buf;
    }
    return out.str();
}

} // namespace qdts
