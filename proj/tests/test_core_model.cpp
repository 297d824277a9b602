#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "qdts/errors.hpp"
#include "qdts/io.hpp"
#include "qdts/trajectory.hpp"
#include "support/fixtures.hpp"

using namespace qdts;
using test::TempDir;

TEST_CASE("loading groups rows by id and counts points") {
    TempDir dir;
    const auto path = test::write_text(dir, "two.csv",
                                       "traj_id,t,x,y\n"
                                       "a,0,0,0\n"
                                       "a,1,1,0\n"
                                       "a,2,2,0\n"
                                       "b,5,0,1\n"
                                       "b,6,1,1\n"
                                       "b,7,2,1\n");
    const TrajectoryDatabase db = load_trajectories(path);
    CHECK(db.trajectory_count() == 2);
    CHECK(db.point_count() == 6);
    CHECK(db.trajectory(0).id == "a");
    CHECK(db.trajectory(1).points[2].x == 2.0);
}

TEST_CASE("out-of-order rows are sorted by time within a trajectory") {
    TempDir dir;
    const auto path = test::write_text(dir, "shuffled.csv",
                                       "traj_id,t,x,y\n"
                                       "a,2,2,0\n"
                                       "a,0,0,0\n"
                                       "a,1,1,0\n");
    const TrajectoryDatabase db = load_trajectories(path);
    REQUIRE(db.trajectory(0).points.size() == 3);
    CHECK(db.trajectory(0).points[0].t == 0.0);
    CHECK(db.trajectory(0).points[2].t == 2.0);
}

TEST_CASE("loader rejects bad input") {
    TempDir dir;
    SUBCASE("decreasing timestamp") {
        const auto path = test::write_text(dir, "bad_t.csv",
                                           "traj_id,t,x,y\n"
                                           "a,1,0,0\n"
                                           "a,1,1,0\n");
        CHECK_THROWS_AS(load_trajectories(path), NonIncreasingTimestamp);
    }
    SUBCASE("single-point trajectory") {
        const auto path = test::write_text(dir, "short.csv",
                                           "traj_id,t,x,y\n"
                                           "a,1,0,0\n");
        CHECK_THROWS_AS(load_trajectories(path), TrajectoryTooShort);
    }
    SUBCASE("malformed row") {
        const auto path = test::write_text(dir, "mal.csv",
                                           "traj_id,t,x,y\n"
                                           "a,1,zero,0\n");
        CHECK_THROWS_AS(load_trajectories(path), MalformedRow);
    }
    SUBCASE("wrong field count") {
        const auto path = test::write_text(dir, "fields.csv",
                                           "traj_id,t,x,y\n"
                                           "a,1,0\n");
        CHECK_THROWS_AS(load_trajectories(path), MalformedRow);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_trajectories(dir.file("nope.csv")), MissingFile);
    }
}

TEST_CASE("projection about the reference point") {
    SUBCASE("reference maps to the origin") {
        const auto [x, y] = project_latlon(39.9, 116.4, 39.9, 116.4);
        CHECK(x == 0.0);
        CHECK(y == 0.0);
    }
    SUBCASE("one degree of latitude") {
        // R * pi / 180 = 6371000 * 0.01745329... = 111194.926...
        const auto [x, y] = project_latlon(40.9, 116.4, 39.9, 116.4);
        CHECK(x == doctest::Approx(0.0));
        CHECK(y == doctest::Approx(111194.9).epsilon(1e-5));
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(project_latlon(100.0, 0.0, 0.0, 0.0), OutOfRangeCoordinate);
        CHECK_THROWS_AS(project_latlon(0.0, 200.0, 0.0, 0.0), OutOfRangeCoordinate);
    }
}

TEST_CASE("lat/lon input is projected to meters") {
    TempDir dir;
    const auto path = test::write_text(dir, "geo.csv",
                                       "traj_id,t,lat,lon\n"
                                       "a,0,39.9,116.4\n"
                                       "a,10,39.91,116.4\n");
    const TrajectoryDatabase db = load_trajectories(path);
    const Point& p0 = db.trajectory(0).points[0];
    const Point& p1 = db.trajectory(0).points[1];
    CHECK(std::abs(p1.y - p0.y) == doctest::Approx(1111.949).epsilon(1e-4));
    CHECK(p1.x == doctest::Approx(p0.x));
}

TEST_CASE("csv round-trip reproduces the database") {
    std::mt19937_64 rng(7);
    const TrajectoryDatabase db = test::random_database(rng, 5, 2, 20);
    TempDir dir;
    const auto path = dir.file("rt.csv");
    save_trajectories(db, path);
    const TrajectoryDatabase back = load_trajectories(path);
    REQUIRE(back.trajectory_count() == db.trajectory_count());
    REQUIRE(back.point_count() == db.point_count());
    for (std::size_t i = 0; i < db.trajectory_count(); ++i) {
        CHECK(back.trajectory(i).id == db.trajectory(i).id);
        for (std::size_t j = 0; j < db.trajectory(i).points.size(); ++j) {
            CHECK(back.trajectory(i).points[j].x == db.trajectory(i).points[j].x);
            CHECK(back.trajectory(i).points[j].y == db.trajectory(i).points[j].y);
            CHECK(back.trajectory(i).points[j].t == db.trajectory(i).points[j].t);
        }
    }
}

TEST_CASE("anchor_segment brackets the query index") {
    SUBCASE("single segment") {
        const std::vector<std::uint32_t> kept{0, 9};
        for (std::uint32_t i = 0; i < 9; ++i) {
            const auto [lo, hi] = anchor_segment(kept, i);
            CHECK(lo == 0);
            CHECK(hi == 9);
        }
    }
    SUBCASE("interior kept points, 1-based spec example kept={1,3,5}") {
        const std::vector<std::uint32_t> kept{0, 2, 4};
        CHECK(anchor_segment(kept, 3) == std::pair<std::uint32_t, std::uint32_t>{2, 4});
        // s_j <= i < s_{j+1}: a kept interior index starts its own segment.
        CHECK(anchor_segment(kept, 2) == std::pair<std::uint32_t, std::uint32_t>{2, 4});
        // The last point maps to the final segment.
        CHECK(anchor_segment(kept, 4) == std::pair<std::uint32_t, std::uint32_t>{2, 4});
    }
}

TEST_CASE("anchor segments tile the index range") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 50; ++round) {
        const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(2, 30)(rng);
        std::set<std::uint32_t> kept_set{0, n - 1};
        const int extra = int(rng() % n);
        for (int e = 0; e < extra; ++e)
            kept_set.insert(std::uint32_t(rng() % n));
        const std::vector<std::uint32_t> kept(kept_set.begin(), kept_set.end());

        std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
        for (std::uint32_t i = 0; i < n; ++i) {
            const auto seg = anchor_segment(kept, i);
            CHECK(seg.first <= i);
            CHECK((i < seg.second || (i == n - 1 && seg.second == n - 1)));
            seen.insert(seg);
        }
        std::set<std::pair<std::uint32_t, std::uint32_t>> expected;
        for (std::size_t j = 0; j + 1 < kept.size(); ++j)
            expected.insert({kept[j], kept[j + 1]});
        CHECK(seen == expected);
    }
}

TEST_CASE("simplified database keeps endpoints and stays sorted") {
    std::mt19937_64 rng(3);
    const TrajectoryDatabase db = test::random_database(rng, 4, 4, 20);
    SimplifiedDatabase view(db, db.point_count());
    CHECK(view.kept_count() == 2 * db.trajectory_count());
    for (std::size_t i = 0; i < db.trajectory_count(); ++i) {
        CHECK(view.kept(i).front() == 0);
        CHECK(view.kept(i).back() == db.trajectory(i).size() - 1);
    }
    view.insert(0, 2);
    view.insert(0, 1);
    view.insert(0, 2);  // duplicate insert is a no-op
    CHECK(view.kept(0)[0] == 0);
    CHECK(view.kept(0)[1] == 1);
    CHECK(view.kept(0)[2] == 2);
    CHECK(view.is_kept(0, 1));
    CHECK_FALSE(view.is_kept(0, 3));
}

TEST_CASE("from_kept_sets validates endpoints") {
    std::mt19937_64 rng(4);
    const TrajectoryDatabase db = test::random_database(rng, 2, 4, 8);
    std::vector<std::vector<std::uint32_t>> kept(2);
    kept[0] = {0, std::uint32_t(db.trajectory(0).size() - 1)};
    kept[1] = {1, std::uint32_t(db.trajectory(1).size() - 1)};  // missing first point
    CHECK_THROWS(SimplifiedDatabase::from_kept_sets(db, std::move(kept), 4));
}

TEST_CASE("kept-index csv round-trips") {
    std::mt19937_64 rng(5);
    const TrajectoryDatabase db = test::random_database(rng, 3, 5, 12);
    SimplifiedDatabase view(db, 10);
    view.insert(1, 2);
    TempDir dir;
    const auto path = dir.file("kept.csv");
    save_kept(view, path);
    const SimplifiedDatabase back = load_kept(db, path);
    CHECK(back.kept_count() == view.kept_count());
    for (std::size_t i = 0; i < db.trajectory_count(); ++i)
        CHECK(back.kept(i) == view.kept(i));
}
