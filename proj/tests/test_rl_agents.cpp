#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qdts/agents.hpp"
#include "qdts/errors.hpp"
#include "qdts/octree.hpp"
#include "support/fixtures.hpp"

using namespace qdts;

namespace {

// Two three-point trajectories whose interior points carry the published
// example values: (v_s, v_t) = (1.6, 0.5) and (1.3, 0.7) against their
// endpoint anchor segments.
TrajectoryDatabase example_cube_db() {
    std::vector<Trajectory> ts;
    ts.push_back(test::make_trajectory(
        "T2", {Point{0, 0, 0}, Point{1.0, std::sqrt(2.31), 1.5}, Point{2, 0, 2}}));
    ts.push_back(test::make_trajectory(
        "T3",
        {Point{0, 10, 0}, Point{0.8, 10 + std::sqrt(1.2), 1.5}, Point{2, 10, 2}}));
    return TrajectoryDatabase(std::move(ts));
}

} // namespace

TEST_CASE("point values against the anchor segment") {
    SUBCASE("published example pair values") {
        const TrajectoryDatabase db = example_cube_db();
        const std::vector<std::uint32_t> ends{0, 2};
        const PointValue v2 = point_values(db.trajectory(0), ends, 1);
        CHECK(v2.v_s == doctest::Approx(1.6));
        CHECK(v2.v_t == doctest::Approx(0.5));
        const PointValue v3 = point_values(db.trajectory(1), ends, 1);
        CHECK(v3.v_s == doctest::Approx(1.3));
        CHECK(v3.v_t == doctest::Approx(0.7));
    }
    SUBCASE("a candidate on the synchronized motion has v_s = 0") {
        const Trajectory t = test::make_trajectory(
            "sync", {Point{0, 0, 0}, Point{5, 0, 5}, Point{10, 0, 10}});
        const PointValue v = point_values(t, std::vector<std::uint32_t>{0, 2}, 1);
        CHECK(v.v_s == 0.0);
        CHECK(v.v_t == 0.0);
    }
    SUBCASE("v_t is the time gap to the spatial projection") {
        const Trajectory t = test::make_trajectory(
            "proj", {Point{0, 0, 0}, Point{3, 4, 9}, Point{10, 0, 10}});
        const PointValue v = point_values(t, std::vector<std::uint32_t>{0, 2}, 1);
        // Projection of (3, 4) onto the x-axis segment is (3, 0), whose
        // interpolated time is 3; the point's own time is 9.
        CHECK(v.v_t == doctest::Approx(6.0));
        CHECK(v.v_s == doctest::Approx(std::sqrt(52.0)));
    }
}

TEST_CASE("per-trajectory argmax picks the largest v_s with smallest-index ties") {
    const Trajectory t = test::make_trajectory(
        "m", {Point{0, 0, 0}, Point{1, 3, 1}, Point{2, 5, 2}, Point{3, 5, 3},
              Point{4, 0, 4}});
    const std::vector<std::uint32_t> ends{0, 4};
    const std::vector<std::uint32_t> candidates{1, 2, 3};
    const BestCandidate best = best_candidate(t, ends, candidates);
    CHECK(best.point == 2);  // 5 == 5 tie resolves to the earlier index
    CHECK_THROWS_AS(best_candidate(t, ends, {}), NoCandidates);
}

TEST_CASE("point state ranks trajectories by v_s and pads missing slots") {
    const TrajectoryDatabase db = example_cube_db();
    const QueryWorkload no_queries;
    Octree tree(db, no_queries, 2);
    SimplifiedDatabase view(db, db.point_count());
    tree.reset_uninserted();
    for (const Trajectory& t : db.trajectories()) {
        tree.mark_inserted(t.points.front());
        tree.mark_inserted(t.points.back());
    }

    SUBCASE("descending v_s order, K = 2") {
        const PointState s = build_point_state(tree, tree.root(), view, 2);
        REQUIRE(s.values.size() == 4);
        CHECK(s.values[0] == doctest::Approx(1.6));
        CHECK(s.values[1] == doctest::Approx(0.5));
        CHECK(s.values[2] == doctest::Approx(1.3));
        CHECK(s.values[3] == doctest::Approx(0.7));
        CHECK(s.valid == std::vector<std::uint8_t>{1, 1});
        CHECK(s.slots[0].traj == 0);
        CHECK(s.slots[1].traj == 1);
        // Slot ordering invariant: v_s never increases across slots.
        CHECK(s.values[0] >= s.values[2]);
    }
    SUBCASE("more slots than trajectories: zero-padded and masked") {
        const PointState s = build_point_state(tree, tree.root(), view, 4);
        CHECK(s.valid == std::vector<std::uint8_t>{1, 1, 0, 0});
        CHECK(s.values[4] == 0.0);
        CHECK(s.values[5] == 0.0);
        CHECK(s.values[6] == 0.0);
    }
    SUBCASE("inserted candidates leave the state") {
        view.insert(0, 1);
        tree.mark_inserted(db.trajectory(0).points[1]);
        const PointState s = build_point_state(tree, tree.root(), view, 2);
        CHECK(s.valid == std::vector<std::uint8_t>{1, 0});
        CHECK(s.slots[0].traj == 1);
        view.insert(1, 1);
        tree.mark_inserted(db.trajectory(1).points[1]);
        CHECK_THROWS_AS(build_point_state(tree, tree.root(), view, 2), CubeExhausted);
    }
}

TEST_CASE("three candidate trajectories, top two slots") {
    std::vector<Trajectory> ts;
    const double devs[] = {5.0, 3.0, 1.0};
    for (int i = 0; i < 3; ++i)
        ts.push_back(test::make_trajectory(
            "c" + std::to_string(i),
            {Point{0, double(20 * i), 0}, Point{1, 20 * i + devs[i], 1},
             Point{2, double(20 * i), 2}}));
    const TrajectoryDatabase db(std::move(ts));
    Octree tree(db, {}, 2);
    SimplifiedDatabase view(db, db.point_count());
    tree.reset_uninserted();
    for (const Trajectory& t : db.trajectories()) {
        tree.mark_inserted(t.points.front());
        tree.mark_inserted(t.points.back());
    }
    const PointState s = build_point_state(tree, tree.root(), view, 2);
    CHECK(s.values[0] == doctest::Approx(5.0));
    CHECK(s.values[2] == doctest::Approx(3.0));
    CHECK(s.slots[0].traj == 0);
    CHECK(s.slots[1].traj == 1);
}

TEST_CASE("q network forward") {
    SUBCASE("zero weights output the biases") {
        QNetwork net(16, 9);
        net.b2()[3] = 0.25;
        const std::vector<double> q = net.forward(std::vector<double>(16, 0.7));
        CHECK(q.size() == 9);
        CHECK(q[3] == 0.25);
        CHECK(q[0] == 0.0);
    }
    SUBCASE("arity contract") {
        QNetwork cube(16, 9);
        QNetwork point(4, 2);
        CHECK(cube.forward(std::vector<double>(16, 0.0)).size() == 9);
        CHECK(point.forward(std::vector<double>(4, 0.0)).size() == 2);
        CHECK_THROWS_AS(cube.forward(std::vector<double>(15, 0.0)), ShapeMismatch);
    }
}

TEST_CASE("td gradients match central finite differences") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (const auto& [in, out] : {std::pair{16, 9}, std::pair{4, 2}}) {
        for (int round = 0; round < 25; ++round) {
            QNetwork net(in, out);
            net.init_random(rng);
            std::vector<double> state(in);
            for (double& s : state) s = unit(rng);
            const int action = int(rng() % out);
            const double target = unit(rng) * 2.0;

            QNetwork::Gradients grad = net.zero_gradients();
            net.accumulate_td_gradient(state, action, target, grad);

            const auto check_group = [&](std::vector<double>& params,
                                         const std::vector<double>& g) {
                for (std::size_t i = 0; i < params.size(); i += 7) {
                    const double orig = params[i];
                    const double h = 1e-6 * std::max(1.0, std::abs(orig));
                    params[i] = orig + h;
                    const double q_plus = net.forward(state)[action];
                    params[i] = orig - h;
                    const double q_minus = net.forward(state)[action];
                    params[i] = orig;
                    const double loss_plus = (q_plus - target) * (q_plus - target);
                    const double loss_minus = (q_minus - target) * (q_minus - target);
                    const double fd = (loss_plus - loss_minus) / (2 * h);
                    CHECK(std::abs(g[i] - fd) <= 1e-7 + 1e-5 * std::abs(fd));
                }
            };
            check_group(net.w1(), grad.w1);
            check_group(net.b1(), grad.b1);
            check_group(net.w2(), grad.w2);
            check_group(net.b2(), grad.b2);
        }
    }
}

TEST_CASE("action selection") {
    std::mt19937_64 rng(72);
    QNetwork net(4, 4);
    net.init_random(rng);

    SUBCASE("greedy with one valid action returns it") {
        const std::vector<std::uint8_t> mask{0, 0, 1, 0};
        CHECK(select_action(net, std::vector<double>(4, 0.3), mask, 0.0, rng) == 2);
    }
    SUBCASE("full exploration splits evenly between two valid actions") {
        const std::vector<std::uint8_t> mask{0, 1, 0, 1};
        int count1 = 0;
        for (int i = 0; i < 10000; ++i)
            if (select_action(net, std::vector<double>(4, 0.1), mask, 1.0, rng) == 1)
                ++count1;
        CHECK(std::abs(count1 / 10000.0 - 0.5) < 0.05);
    }
    SUBCASE("adding a constant to every output keeps the greedy choice") {
        const std::vector<double> state{0.4, -0.2, 0.9, 0.0};
        const std::vector<std::uint8_t> mask{1, 1, 1, 1};
        const int before = select_action(net, state, mask, 0.0, rng);
        for (double& b : net.b2()) b += 3.5;
        CHECK(select_action(net, state, mask, 0.0, rng) == before);
    }
    SUBCASE("an all-invalid mask raises") {
        const std::vector<std::uint8_t> mask{0, 0, 0, 0};
        CHECK_THROWS_AS(select_action(net, std::vector<double>(4, 0.0), mask, 0.0, rng),
                        NoValidAction);
    }
    SUBCASE("masked actions are never selected") {
        const std::vector<std::uint8_t> mask{1, 0, 1, 0};
        for (int i = 0; i < 500; ++i) {
            const int a = select_action(net, std::vector<double>(4, 0.2), mask, 0.7, rng);
            CHECK((a == 0 || a == 2));
        }
    }
}

TEST_CASE("reward is the diff improvement") {
    CHECK(compute_reward(0.3, 0.3) == 0.0);
    CHECK(compute_reward(0.40, 0.25) == doctest::Approx(0.15));
}

TEST_CASE("replay memory is a fifo ring with reproducible sampling") {
    ReplayMemory mem(3);
    for (int i = 0; i < 5; ++i) {
        Transition t;
        t.state = {double(i)};
        t.terminal = true;
        t.action = 0;
        mem.push(std::move(t));
    }
    CHECK(mem.size() == 3);
    CHECK(mem.capacity() == 3);
    std::mt19937_64 rng_a(9), rng_b(9);
    const auto sample_a = mem.sample(16, rng_a);
    const auto sample_b = mem.sample(16, rng_b);
    for (std::size_t i = 0; i < sample_a.size(); ++i) {
        CHECK(sample_a[i] == sample_b[i]);
        CHECK(sample_a[i]->state[0] >= 2.0);  // 0 and 1 were evicted
    }
}

TEST_CASE("dqn update targets") {
    std::mt19937_64 rng(73);
    DqnConfig cfg;
    SUBCASE("terminal transitions regress to the reward exactly") {
        QNetwork net(4, 2);  // zero weights: q == 0 everywhere
        AdamOptimizer opt(net);
        Transition t;
        t.state = {0.1, 0.2, 0.3, 0.4};
        t.action = 1;
        t.reward = 0.8;
        t.terminal = true;
        const Transition* batch[] = {&t};
        // Loss is (q - r)^2 = 0.64 on the first call.
        const double loss = dqn_update(net, net, batch, cfg, opt);
        CHECK(loss == doctest::Approx(0.64));
    }
    SUBCASE("gamma = 0 reduces every target to the reward") {
        QNetwork net(4, 2), target(4, 2);
        target.b2()[0] = 100.0;  // would dominate any discounted target
        AdamOptimizer opt(net);
        Transition t;
        t.state = {0.1, 0.2, 0.3, 0.4};
        t.action = 0;
        t.reward = 0.5;
        t.next_state = {0.0, 0.0, 0.0, 0.0};
        t.next_valid = {1, 1};
        const Transition* batch[] = {&t};
        DqnConfig zero = cfg;
        zero.gamma = 0.0;
        const double loss = dqn_update(net, target, batch, zero, opt);
        CHECK(loss == doctest::Approx(0.25));
    }
    SUBCASE("masked next actions are excluded from the bootstrap") {
        QNetwork net(4, 2), target(4, 2);
        target.b2()[0] = 5.0;
        target.b2()[1] = 1.0;
        AdamOptimizer opt(net);
        Transition t;
        t.state = {0, 0, 0, 0};
        t.action = 0;
        t.reward = 0.0;
        t.next_state = {0, 0, 0, 0};
        t.next_valid = {0, 1};  // the 5.0 action is invalid
        const Transition* batch[] = {&t};
        // Target = 0 + 0.99 * 1.0; loss = (0 - 0.99)^2.
        const double loss = dqn_update(net, target, batch, cfg, opt);
        CHECK(loss == doctest::Approx(0.99 * 0.99));
    }
    SUBCASE("repeated updates on one batch drive the loss down") {
        std::vector<Transition> pool(8);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            pool[i].state = {unit(rng), unit(rng), unit(rng), unit(rng)};
            pool[i].action = int(i % 2);
            pool[i].reward = unit(rng);
            pool[i].terminal = true;
        }
        std::vector<const Transition*> batch;
        for (const Transition& t : pool) batch.push_back(&t);

        QNetwork net(4, 2);
        net.init_random(rng);
        AdamOptimizer opt(net);
        QNetwork target = net;
        DqnConfig gentle = cfg;
        gentle.learning_rate = 0.001;  // smooth descent for the monotonicity check
        std::vector<double> losses;
        for (int step = 0; step < 50; ++step)
            losses.push_back(dqn_update(net, target, batch, gentle, opt));
        for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] < losses[i - 1]);
    }
}
