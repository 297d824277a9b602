#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "qdts/bench.hpp"
#include "qdts/errors.hpp"
#include "qdts/synth.hpp"
#include "support/fixtures.hpp"

using namespace qdts;

namespace {

TrajectoryDatabase bench_db() {
    SynthSpec spec;
    spec.trajectory_count = 25;
    spec.points_per_trajectory = 40;
    spec.domain_size = 8000;
    spec.hotspot_count = 3;
    spec.time_span = 40000;
    spec.seed = 17;
    return synth_database(spec);
}

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.algorithms = {parse_algorithm("topdown-e", "sed"),
                       parse_algorithm("bottomup-e", "ped"),
                       parse_algorithm("rl4qdts", ""),
                       parse_algorithm("random", "")};
    spec.budget_ratios = {0.1, 0.2};
    spec.tasks = {QueryTask::Range, QueryTask::Knn, QueryTask::Similarity};
    spec.workload.count = 15;
    spec.workload.spatial_extent = 800;
    spec.workload.temporal_extent = 8000;
    spec.query_params.knn_k = 2;
    spec.query_params.edr_eps = 800;
    spec.query_params.similarity_delta = 4000;
    spec.query_params.window_length = 30000;
    spec.query_params.trajectory_query_count = 6;
    spec.repetitions = 3;
    spec.seed = 21;
    return spec;
}

} // namespace

TEST_CASE("bench produces one row per algorithm x budget x task") {
    const TrajectoryDatabase db = bench_db();
    const ExperimentSpec spec = small_spec();
    DriverConfig cfg;
    cfg.start_level = 2;
    cfg.end_level = 4;
    cfg.reward_workload_size = 15;
    const Policies policies = Policies::make(cfg.k_candidates, 3);

    const auto rows = run_bench(db, spec, &policies, &cfg, 2);
    CHECK(rows.size() ==
          spec.algorithms.size() * spec.budget_ratios.size() * spec.tasks.size());
    for (const BenchRow& r : rows) {
        CHECK(r.f1_mean >= 0.0);
        CHECK(r.f1_mean <= 1.0);
        CHECK(r.f1_std >= 0.0);
        CHECK(r.wallclock_s >= 0.0);
    }
    // Baselines are deterministic: their std must be zero.
    for (const BenchRow& r : rows)
        if (r.algorithm == "topdown-e" || r.algorithm == "bottomup-e")
            CHECK(r.f1_std == 0.0);
}

TEST_CASE("bench is reproducible apart from wallclock") {
    const TrajectoryDatabase db = bench_db();
    ExperimentSpec spec = small_spec();
    spec.tasks = {QueryTask::Range};
    spec.repetitions = 2;
    DriverConfig cfg;
    cfg.start_level = 2;
    cfg.end_level = 4;
    cfg.reward_workload_size = 10;
    const Policies policies = Policies::make(cfg.k_candidates, 5);

    const auto a = run_bench(db, spec, &policies, &cfg, 1);
    const auto b = run_bench(db, spec, &policies, &cfg, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].algorithm == b[i].algorithm);
        CHECK(a[i].f1_mean == b[i].f1_mean);
        CHECK(a[i].f1_std == b[i].f1_std);
    }
}

TEST_CASE("results csv round-trips") {
    std::vector<BenchRow> rows{
        BenchRow{"rl4qdts", "-", "-", 0.01, "range", 0.75, 0.02, 1.5},
        BenchRow{"topdown-e", "sed", "e", 0.02, "knn", 0.5, 0.0, 0.2},
    };
    test::TempDir dir;
    const auto path = dir.file("results.csv");
    write_results_csv(rows, path);
    const auto back = load_results_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].algorithm == "rl4qdts");
    CHECK(back[0].f1_mean == 0.75);
    CHECK(back[1].measure == "sed");
    CHECK(back[1].budget_ratio == 0.02);
}

TEST_CASE("malformed results are rejected") {
    test::TempDir dir;
    const auto bad_header = test::write_text(dir, "bad.csv", "nope\n1,2\n");
    CHECK_THROWS_AS(load_results_csv(bad_header), MalformedResults);
    const auto bad_field = test::write_text(
        dir, "field.csv",
        "algorithm,measure,adaptation,budget_ratio,task,f1_mean,f1_std,wallclock_s\n"
        "a,b,c,x,range,0.5,0,1\n");
    CHECK_THROWS_AS(load_results_csv(bad_field), MalformedResults);
}

TEST_CASE("sweep report flags the best row") {
    std::vector<SweepRow> rows{
        SweepRow{"k", 1, 0.61, 0.02, 3.0},
        SweepRow{"k", 2, 0.73, 0.01, 3.5},
        SweepRow{"k", 3, 0.70, 0.02, 4.1},
    };
    const std::string report = sweep_report(rows);
    CHECK(report.find("<- best") != std::string::npos);
    const std::size_t best_line = report.find("2 ");
    const std::size_t flag = report.find("<- best");
    CHECK(best_line < flag);
    CHECK_THROWS_AS(sweep_report({}), MalformedResults);

    test::TempDir dir;
    const auto path = dir.file("sweep.csv");
    write_sweep_csv(rows, path);
    const auto back = load_sweep_csv(path);
    REQUIRE(back.size() == 3);
    CHECK(back[1].f1_mean == 0.73);
}

TEST_CASE("single sweep row is its own argmax") {
    const std::vector<SweepRow> rows{SweepRow{"end-level", 4, 0.5, 0.0, 1.0}};
    const std::string report = sweep_report(rows);
    CHECK(report.find("<- best") != std::string::npos);
}
