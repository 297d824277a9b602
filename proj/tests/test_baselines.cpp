#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <limits>

#include "qdts/baselines.hpp"
#include "qdts/errors.hpp"
#include "support/fixtures.hpp"

using namespace qdts;

namespace {

// Re-scan reference for the budgeted top-down strategy: every step walks
// all uninserted interior points, recomputes their error against the
// current anchor segment and keeps the largest (smallest index on ties).
// No priority queue, no caching.
std::vector<std::uint32_t> naive_top_down(const Trajectory& t, std::size_t budget,
                                          ErrorMeasure m) {
    const std::uint32_t n = std::uint32_t(t.size());
    std::vector<std::uint32_t> kept{0, n - 1};
    if (budget >= n) {
        kept.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) kept[i] = i;
        return kept;
    }
    while (kept.size() < budget) {
        double best_err = -1.0;
        std::uint32_t best = 0;
        for (std::uint32_t i = 1; i + 1 < n; ++i) {
            if (std::binary_search(kept.begin(), kept.end(), i)) continue;
            const auto [lo, hi] = anchor_segment(kept, i);
            const double err =
                point_error(m, t.points[lo], t.points[hi], t.points[i], &t.points[i + 1]);
            if (err > best_err) {
                best_err = err;
                best = i;
            }
        }
        kept.insert(std::upper_bound(kept.begin(), kept.end(), best), best);
    }
    return kept;
}

// Same idea for bottom-up: re-scan all droppable interior points each step.
std::vector<std::uint32_t> naive_bottom_up(const Trajectory& t, std::size_t budget,
                                           ErrorMeasure m) {
    const std::uint32_t n = std::uint32_t(t.size());
    std::vector<std::uint32_t> kept(n);
    for (std::uint32_t i = 0; i < n; ++i) kept[i] = i;
    while (kept.size() > std::max<std::size_t>(budget, 2)) {
        double best_err = std::numeric_limits<double>::infinity();
        std::size_t best_pos = 0;
        for (std::size_t pos = 1; pos + 1 < kept.size(); ++pos) {
            const std::uint32_t i = kept[pos];
            const double err = point_error(m, t.points[kept[pos - 1]],
                                           t.points[kept[pos + 1]], t.points[i],
                                           &t.points[i + 1]);
            if (err < best_err) {
                best_err = err;
                best_pos = pos;
            }
        }
        kept.erase(kept.begin() + best_pos);
    }
    return kept;
}

Trajectory zigzag5() {
    // Deviations 2, 8, 1 against the straight anchor: p2 wins first.
    return test::make_trajectory("z", {Point{0, 0, 0}, Point{10, 2, 1}, Point{20, 8, 2},
                                       Point{30, 1, 3}, Point{40, 0, 4}});
}

Trajectory straight_line(std::size_t n) {
    Trajectory t{"line", {}};
    for (std::size_t i = 0; i < n; ++i)
        t.points.push_back(Point{double(i) * 5, 0.0, double(i)});
    return t;
}

constexpr ErrorMeasure kAll[] = {ErrorMeasure::Sed, ErrorMeasure::Ped, ErrorMeasure::Dad,
                                 ErrorMeasure::Sad};

} // namespace

TEST_CASE("top-down budget edges") {
    const Trajectory t = zigzag5();
    CHECK(top_down_trajectory(t, 2, ErrorMeasure::Sed) ==
          std::vector<std::uint32_t>{0, 4});
    CHECK(top_down_trajectory(t, 5, ErrorMeasure::Sed) ==
          std::vector<std::uint32_t>{0, 1, 2, 3, 4});
    CHECK(top_down_trajectory(t, 9, ErrorMeasure::Sed) ==
          std::vector<std::uint32_t>{0, 1, 2, 3, 4});
}

TEST_CASE("top-down inserts the largest-error interior point first") {
    const Trajectory t = zigzag5();
    // Hand enumeration against the anchor 0->4 (uniform motion along x):
    // sed(p1) = 2, sed(p2) = 8, sed(p3) = 1.
    CHECK(point_error(ErrorMeasure::Sed, t.points[0], t.points[4], t.points[2]) ==
          doctest::Approx(8.0));
    const auto kept = top_down_trajectory(t, 3, ErrorMeasure::Sed);
    CHECK(kept == std::vector<std::uint32_t>{0, 2, 4});
}

TEST_CASE("bottom-up budget edges and straight lines") {
    const Trajectory line = straight_line(8);
    CHECK(bottom_up_trajectory(line, 8, ErrorMeasure::Sed).size() == 8);
    const auto kept = bottom_up_trajectory(line, 2, ErrorMeasure::Sed);
    CHECK(kept == std::vector<std::uint32_t>{0, 7});
    CHECK(trajectory_error(ErrorMeasure::Sed, line, kept) == 0.0);
}

TEST_CASE("bottom-up drop order matches the re-scan simulation") {
    const Trajectory t = test::make_trajectory(
        "six", {Point{0, 0, 0}, Point{10, 1, 1}, Point{20, 6, 2}, Point{30, 2, 3},
                Point{40, 7, 4}, Point{50, 0, 5}});
    for (ErrorMeasure m : kAll)
        for (std::size_t budget = 2; budget <= 6; ++budget)
            CHECK(bottom_up_trajectory(t, budget, m) == naive_bottom_up(t, budget, m));
}

TEST_CASE("priority-queue implementations match the re-scan references") {
    std::mt19937_64 rng(61);
    for (int round = 0; round < 60; ++round) {
        const Trajectory t = test::random_trajectory(rng, "r", 2, 30);
        const std::size_t budget =
            std::uniform_int_distribution<std::size_t>(2, t.size())(rng);
        for (ErrorMeasure m : kAll) {
            CHECK(top_down_trajectory(t, budget, m) == naive_top_down(t, budget, m));
            CHECK(bottom_up_trajectory(t, budget, m) == naive_bottom_up(t, budget, m));
        }
    }
}

TEST_CASE("per-trajectory budget rule") {
    CHECK(per_trajectory_budget(0.1, 10) == 2);    // floor 1 raised to 2
    CHECK(per_trajectory_budget(0.1, 1000) == 100);
    CHECK(per_trajectory_budget(0.5, 7) == 3);
    CHECK(per_trajectory_budget(2.0, 7) == 14);    // callers clamp to n
}

TEST_CASE("per-trajectory adaptation splits the budget proportionally") {
    std::vector<Trajectory> ts;
    Trajectory a = straight_line(10);
    a.id = "a";
    Trajectory b = zigzag5();
    b.id = "b";
    b.points.push_back(Point{50, 0, 5});
    b.points.push_back(Point{60, 0, 6});
    b.points.push_back(Point{70, 0, 7});
    b.points.push_back(Point{80, 0, 8});
    b.points.push_back(Point{90, 0, 9});  // now 10 points as well
    ts.push_back(a);
    ts.push_back(b);
    const TrajectoryDatabase db(std::move(ts));

    SUBCASE("r = 0.5 keeps half of each") {
        const auto view =
            adapt_per_trajectory(db, 10, BaselineAlgorithm::TopDown, ErrorMeasure::Sed);
        CHECK(view.kept(0).size() == 5);
        CHECK(view.kept(1).size() == 5);
    }
    SUBCASE("W = 2M reduces everything to the endpoints") {
        const auto view =
            adapt_per_trajectory(db, 4, BaselineAlgorithm::BottomUp, ErrorMeasure::Sed);
        CHECK(view.kept_count() == 4);
        CHECK(view.kept(0) == std::vector<std::uint32_t>{0, 9});
    }
    SUBCASE("budget below 2M raises") {
        CHECK_THROWS_AS(
            adapt_per_trajectory(db, 3, BaselineAlgorithm::TopDown, ErrorMeasure::Sed),
            BudgetTooSmall);
    }
}

TEST_CASE("per-trajectory adaptation respects the global bound with short trajectories") {
    // Endpoint minimums would overshoot: 5 two-point trajectories plus a
    // long one under a tight budget.
    std::vector<Trajectory> ts;
    for (int i = 0; i < 5; ++i) {
        Trajectory t = straight_line(2);
        t.id = "s" + std::to_string(i);
        ts.push_back(t);
    }
    Trajectory big = straight_line(90);
    big.id = "big";
    ts.push_back(big);
    const TrajectoryDatabase db(std::move(ts));  // N = 100, M = 6

    const std::size_t w = 12;  // r = 0.12: floors {0 x5, 10}, raised {2 x5, 10} = 20 > 12
    const auto view =
        adapt_per_trajectory(db, w, BaselineAlgorithm::TopDown, ErrorMeasure::Sed);
    CHECK(view.kept_count() <= w);
    for (std::size_t i = 0; i < db.trajectory_count(); ++i) {
        CHECK(view.kept(i).front() == 0);
        CHECK(view.kept(i).back() == db.trajectory(i).size() - 1);
    }
}

TEST_CASE("whole-database adaptation") {
    SUBCASE("a single trajectory reduces to the per-trajectory algorithm") {
        std::mt19937_64 rng(62);
        for (int round = 0; round < 20; ++round) {
            const Trajectory t = test::random_trajectory(rng, "solo", 4, 25);
            const std::size_t budget =
                std::uniform_int_distribution<std::size_t>(2, t.size())(rng);
            const TrajectoryDatabase db({t});
            for (ErrorMeasure m : kAll)
                for (BaselineAlgorithm algo :
                     {BaselineAlgorithm::TopDown, BaselineAlgorithm::BottomUp}) {
                    const auto whole = adapt_whole_database(db, budget, algo, m);
                    const auto single =
                        algo == BaselineAlgorithm::TopDown
                            ? top_down_trajectory(t, budget, m)
                            : bottom_up_trajectory(t, budget, m);
                    CHECK(whole.kept(0) == single);
                }
        }
    }
    SUBCASE("the zigzag absorbs the extra budget under sed") {
        std::vector<Trajectory> ts;
        Trajectory line = straight_line(5);
        line.id = "line";
        Trajectory zig = zigzag5();
        zig.id = "zig";
        ts.push_back(line);
        ts.push_back(zig);
        const TrajectoryDatabase db(std::move(ts));
        const auto view = adapt_whole_database(db, 2 * 2 + 2, BaselineAlgorithm::TopDown,
                                               ErrorMeasure::Sed);
        CHECK(view.kept_count() == 6);
        CHECK(view.kept(0).size() == 2);  // the straight line stays simplified
        CHECK(view.kept(1).size() == 4);  // both extras go to the zigzag
    }
    SUBCASE("W = N returns the identity database") {
        std::mt19937_64 rng(63);
        const TrajectoryDatabase db = test::random_database(rng, 5, 3, 12);
        for (BaselineAlgorithm algo :
             {BaselineAlgorithm::TopDown, BaselineAlgorithm::BottomUp}) {
            const auto view =
                adapt_whole_database(db, db.point_count(), algo, ErrorMeasure::Ped);
            CHECK(view.kept_count() == db.point_count());
        }
    }
    SUBCASE("output size is exactly min(W, N)") {
        std::mt19937_64 rng(64);
        const TrajectoryDatabase db = test::random_database(rng, 6, 2, 20);
        const std::size_t m2 = 2 * db.trajectory_count();
        for (std::size_t w : {m2, m2 + 3, db.point_count(), db.point_count() + 50}) {
            for (BaselineAlgorithm algo :
                 {BaselineAlgorithm::TopDown, BaselineAlgorithm::BottomUp}) {
                const auto view = adapt_whole_database(db, w, algo, ErrorMeasure::Sad);
                CHECK(view.kept_count() == std::min(w, db.point_count()));
            }
        }
    }
}

TEST_CASE("identical inputs give identical kept sets") {
    std::mt19937_64 rng(65);
    const TrajectoryDatabase db = test::random_database(rng, 8, 2, 25);
    const std::size_t w = 2 * db.trajectory_count() + db.point_count() / 4;
    for (ErrorMeasure m : kAll)
        for (BaselineAlgorithm algo :
             {BaselineAlgorithm::TopDown, BaselineAlgorithm::BottomUp})
            for (Adaptation ad : {Adaptation::PerTrajectory, Adaptation::WholeDatabase}) {
                const BaselineSpec spec{algo, m, ad};
                const auto a = run_baseline(db, w, spec);
                const auto b = run_baseline(db, w, spec);
                REQUIRE(a.kept_count() == b.kept_count());
                for (std::size_t i = 0; i < db.trajectory_count(); ++i)
                    CHECK(a.kept(i) == b.kept(i));
            }
}

TEST_CASE("baseline spec names parse") {
    const BaselineSpec spec = parse_baseline("bottomup-w", "dad");
    CHECK(spec.algorithm == BaselineAlgorithm::BottomUp);
    CHECK(spec.adaptation == Adaptation::WholeDatabase);
    CHECK(spec.measure == ErrorMeasure::Dad);
    CHECK(spec.name() == "bottomup-w");
    CHECK_THROWS(parse_baseline("sideways-e", "sed"));
}
