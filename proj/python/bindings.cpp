#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qdts/baselines.hpp"
#include "qdts/bench.hpp"
#include "qdts/driver.hpp"
#include "qdts/error_measures.hpp"
#include "qdts/io.hpp"
#include "qdts/octree.hpp"
#include "qdts/queries.hpp"
#include "qdts/rng.hpp"
#include "qdts/synth.hpp"
#include "qdts/workload.hpp"

namespace py = pybind11;
using namespace qdts;

namespace {

TrajectoryDatabase db_from_python(
    const std::vector<std::pair<std::string, std::vector<std::tuple<double, double, double>>>>&
        data) {
    std::vector<Trajectory> ts;
    ts.reserve(data.size());
    for (const auto& [id, pts] : data) {
        Trajectory t{id, {}};
        t.points.reserve(pts.size());
        for (const auto& [x, y, tt] : pts) t.points.push_back(Point{x, y, tt});
        ts.push_back(std::move(t));
    }
    return TrajectoryDatabase(std::move(ts));
}

SimplifiedDatabase simplify_with_checkpoint(const TrajectoryDatabase& db, double ratio,
                                            const std::filesystem::path& checkpoint,
                                            std::uint64_t seed, bool random_policy) {
    DriverConfig cfg;
    const Policies policies = load_checkpoint(checkpoint, &cfg);
    WorkloadSpec wl;
    wl.count = cfg.reward_workload_size;
    wl.seed = derive_seed(seed, 0x696e66);
    Octree octree(db, generate(db, wl), cfg.end_level);
    const std::size_t w = std::max(2 * db.trajectory_count(),
                                   std::size_t(ratio * double(db.point_count())));
    return rl4qdts_simplify(db, w, octree, policies, cfg, seed, random_policy ? 1.0 : 0.0);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "query-accuracy-driven trajectory database simplification";

    py::class_<Point>(m, "Point")
        .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("t"))
        .def_readwrite("x", &Point::x)
        .def_readwrite("y", &Point::y)
        .def_readwrite("t", &Point::t)
        .def("__repr__", [](const Point& p) {
            return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                   std::to_string(p.t) + ")";
        });

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("id", &Trajectory::id)
        .def_property_readonly("points",
                               [](const Trajectory& t) { return t.points; })
        .def("__len__", [](const Trajectory& t) { return t.size(); });

    py::class_<TrajectoryDatabase>(m, "TrajectoryDatabase")
        .def(py::init(&db_from_python), py::arg("trajectories"),
             "Build from [(id, [(x, y, t), ...]), ...]")
        .def_property_readonly("trajectory_count", &TrajectoryDatabase::trajectory_count)
        .def_property_readonly("point_count", &TrajectoryDatabase::point_count)
        .def("trajectory", &TrajectoryDatabase::trajectory, py::arg("index"),
             py::return_value_policy::reference_internal)
        .def("index_of", &TrajectoryDatabase::index_of, py::arg("id"))
        .def("__len__", &TrajectoryDatabase::trajectory_count);

    py::class_<SimplifiedDatabase>(m, "SimplifiedDatabase")
        .def_property_readonly("kept_count", &SimplifiedDatabase::kept_count)
        .def_property_readonly("budget", &SimplifiedDatabase::budget)
        .def("kept", &SimplifiedDatabase::kept, py::arg("trajectory_index"))
        .def("is_kept", &SimplifiedDatabase::is_kept, py::arg("trajectory_index"),
             py::arg("point_index"));

    m.def("load_trajectories",
          [](const std::filesystem::path& p) { return load_trajectories(p); },
          py::arg("path"));
    m.def("save_trajectories", &save_trajectories, py::arg("db"), py::arg("path"));
    m.def("project_latlon", &project_latlon, py::arg("lat"), py::arg("lon"),
          py::arg("ref_lat"), py::arg("ref_lon"));
    m.def("save_kept", &save_kept, py::arg("view"), py::arg("path"));
    m.def("load_kept", &load_kept, py::arg("db"), py::arg("path"),
          py::keep_alive<0, 1>());

    py::enum_<ErrorMeasure>(m, "ErrorMeasure")
        .value("SED", ErrorMeasure::Sed)
        .value("PED", ErrorMeasure::Ped)
        .value("DAD", ErrorMeasure::Dad)
        .value("SAD", ErrorMeasure::Sad);

    m.def("point_error",
          [](ErrorMeasure mm, const Point& ps, const Point& pe, const Point& p,
             std::optional<Point> p_next) {
              return point_error(mm, ps, pe, p, p_next ? &*p_next : nullptr);
          },
          py::arg("measure"), py::arg("anchor_start"), py::arg("anchor_end"),
          py::arg("point"), py::arg("next_point") = std::nullopt);
    m.def("segment_error", &segment_error, py::arg("measure"), py::arg("trajectory"),
          py::arg("start_index"), py::arg("end_index"));
    m.def("trajectory_error",
          [](ErrorMeasure mm, const Trajectory& t, const std::vector<std::uint32_t>& kept) {
              return trajectory_error(mm, t, kept);
          },
          py::arg("measure"), py::arg("trajectory"), py::arg("kept"));

    py::class_<RangeQuery>(m, "RangeQuery")
        .def(py::init<double, double, double, double, double, double>(), py::arg("x_min"),
             py::arg("x_max"), py::arg("y_min"), py::arg("y_max"), py::arg("t_min"),
             py::arg("t_max"))
        .def_readwrite("x_min", &RangeQuery::x_min)
        .def_readwrite("x_max", &RangeQuery::x_max)
        .def_readwrite("y_min", &RangeQuery::y_min)
        .def_readwrite("y_max", &RangeQuery::y_max)
        .def_readwrite("t_min", &RangeQuery::t_min)
        .def_readwrite("t_max", &RangeQuery::t_max);

    m.def("range_query",
          py::overload_cast<const TrajectoryDatabase&, const RangeQuery&>(&range_query),
          py::arg("db"), py::arg("query"));
    m.def("range_query_view",
          py::overload_cast<const SimplifiedDatabase&, const RangeQuery&>(&range_query),
          py::arg("view"), py::arg("query"));
    m.def("edr",
          [](const std::vector<Point>& a, const std::vector<Point>& b, double eps) {
              return edr(a, b, eps);
          },
          py::arg("a"), py::arg("b"), py::arg("eps"));

    py::class_<F1Score>(m, "F1Score")
        .def_readonly("precision", &F1Score::precision)
        .def_readonly("recall", &F1Score::recall)
        .def_readonly("f1", &F1Score::f1);
    m.def("f1", &f1, py::arg("truth"), py::arg("result"));
    m.def("workload_diff", &workload_diff, py::arg("db"), py::arg("view"),
          py::arg("workload"));

    py::enum_<CenterDistribution>(m, "CenterDistribution")
        .value("DATA", CenterDistribution::Data)
        .value("GAUSSIAN", CenterDistribution::Gaussian)
        .value("ZIPF", CenterDistribution::Zipf);

    py::class_<WorkloadSpec>(m, "WorkloadSpec")
        .def(py::init<>())
        .def_readwrite("count", &WorkloadSpec::count)
        .def_readwrite("distribution", &WorkloadSpec::distribution)
        .def_readwrite("gaussian_mu", &WorkloadSpec::gaussian_mu)
        .def_readwrite("gaussian_sigma", &WorkloadSpec::gaussian_sigma)
        .def_readwrite("zipf_a", &WorkloadSpec::zipf_a)
        .def_readwrite("spatial_extent", &WorkloadSpec::spatial_extent)
        .def_readwrite("temporal_extent", &WorkloadSpec::temporal_extent)
        .def_readwrite("seed", &WorkloadSpec::seed);
    m.def("generate_workload", &generate, py::arg("db"), py::arg("spec"));

    m.def("run_baseline",
          [](const TrajectoryDatabase& db, double ratio, const std::string& algo,
             const std::string& measure) {
              const std::size_t w =
                  std::max(2 * db.trajectory_count(),
                           std::size_t(ratio * double(db.point_count())));
              return run_baseline(db, w, parse_baseline(algo, measure));
          },
          py::arg("db"), py::arg("budget_ratio"), py::arg("algorithm"),
          py::arg("measure") = "sed", py::keep_alive<0, 1>());

    py::class_<SynthSpec>(m, "SynthSpec")
        .def(py::init<>())
        .def_readwrite("trajectory_count", &SynthSpec::trajectory_count)
        .def_readwrite("points_per_trajectory", &SynthSpec::points_per_trajectory)
        .def_readwrite("domain_size", &SynthSpec::domain_size)
        .def_readwrite("time_span", &SynthSpec::time_span)
        .def_readwrite("hotspot_count", &SynthSpec::hotspot_count)
        .def_readwrite("hotspot_radius", &SynthSpec::hotspot_radius)
        .def_readwrite("step_seconds", &SynthSpec::step_seconds)
        .def_readwrite("seed", &SynthSpec::seed);
    m.def("synth_database", &synth_database, py::arg("spec"));

    py::class_<DriverConfig>(m, "DriverConfig")
        .def(py::init<>())
        .def_readwrite("start_level", &DriverConfig::start_level)
        .def_readwrite("end_level", &DriverConfig::end_level)
        .def_readwrite("k_candidates", &DriverConfig::k_candidates)
        .def_readwrite("delta", &DriverConfig::delta)
        .def_readwrite("reward_workload_size", &DriverConfig::reward_workload_size);

    py::class_<DqnConfig>(m, "DqnConfig")
        .def(py::init<>())
        .def_readwrite("gamma", &DqnConfig::gamma)
        .def_readwrite("learning_rate", &DqnConfig::learning_rate)
        .def_readwrite("epsilon_min", &DqnConfig::epsilon_min)
        .def_readwrite("epsilon_decay", &DqnConfig::epsilon_decay)
        .def_readwrite("batch_size", &DqnConfig::batch_size)
        .def_readwrite("delta", &DqnConfig::delta)
        .def_readwrite("target_sync_interval", &DqnConfig::target_sync_interval)
        .def_readwrite("updates_per_window", &DqnConfig::updates_per_window);

    m.def("train_policies",
          [](const std::vector<TrajectoryDatabase>& dbs, const DriverConfig& driver,
             const DqnConfig& dqn, const WorkloadSpec& workload, int episodes,
             double budget_ratio, std::uint64_t seed,
             const std::filesystem::path& checkpoint_out) {
              TrainOptions options;
              options.episodes_per_database = episodes;
              options.budget_ratio = budget_ratio;
              options.seed = seed;
              const TrainResult result = train(dbs, driver, dqn, workload, options);
              save_checkpoint(result.policies, driver, checkpoint_out);
              std::vector<double> f1s;
              for (const EpisodeStats& ep : result.episodes) f1s.push_back(ep.f1);
              return py::make_tuple(result.best_f1, f1s);
          },
          py::arg("databases"), py::arg("driver"), py::arg("dqn"), py::arg("workload"),
          py::arg("episodes_per_database"), py::arg("budget_ratio"), py::arg("seed"),
          py::arg("checkpoint_out"));

    m.def("rl4qdts_simplify",
          [](const TrajectoryDatabase& db, double ratio,
             const std::filesystem::path& checkpoint, std::uint64_t seed) {
              return simplify_with_checkpoint(db, ratio, checkpoint, seed, false);
          },
          py::arg("db"), py::arg("budget_ratio"), py::arg("checkpoint"),
          py::arg("seed") = 0, py::keep_alive<0, 1>());
    m.def("random_insertion_simplify",
          [](const TrajectoryDatabase& db, double ratio,
             const std::filesystem::path& checkpoint, std::uint64_t seed) {
              return simplify_with_checkpoint(db, ratio, checkpoint, seed, true);
          },
          py::arg("db"), py::arg("budget_ratio"), py::arg("checkpoint"),
          py::arg("seed") = 0, py::keep_alive<0, 1>());
}
