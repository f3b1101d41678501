#include <doctest.h>

#include <cmath>
#include <random>

#include "eans/dynamics.hpp"

using namespace eans;

namespace {

Trajectory straight(Vec2 a, Vec2 b) { return Trajectory{{a, b}, 0.0}; }

constexpr double kLookahead = 0.5;

// Run until the vehicle is within `tol` of the trajectory end; returns the
// arrival time, or a negative value on timeout.
double fly_to_end(UavState state, const Trajectory& traj, double v_cmd,
                  double a_max, double dt, double tol, double t_limit) {
    while (state.time < t_limit) {
        if (distance(state.position, traj.waypoints.back()) <= tol)
            return state.time;
        state = step(state, traj, v_cmd, a_max, dt, kLookahead);
    }
    return -1.0;
}

}  // namespace

TEST_CASE("acceleration from rest is limited to one increment per step") {
    UavState s;
    s.position = {0, 0};
    UavState next = step(s, straight({0, 0}, {10, 0}), 2.0, 2.0, 0.01, kLookahead);
    CHECK(next.velocity.norm() == doctest::Approx(0.02));
    CHECK(next.time == doctest::Approx(0.01));
}

TEST_CASE("a 10 m straight run at 2 m/s completes on the trapezoidal schedule") {
    // Accelerate 1 s over 1 m, cruise 4 s over 8 m, brake 1 s over 1 m.
    UavState s;
    s.position = {0, 0};
    double t = fly_to_end(s, straight({0, 0}, {10, 0}), 2.0, 2.0, 0.01,
                          /*tol=*/0.01, 20.0);
    REQUIRE(t > 0.0);
    CHECK(t == doctest::Approx(6.0).epsilon(0.03));
}

TEST_CASE("a zero command brakes to rest over the stopping distance") {
    UavState s;
    s.position = {0, 0};
    s.velocity = {2.0, 0.0};
    const double dt = 0.01;
    double t = 0.0;
    while (s.velocity.norm() > 1e-9 && t < 5.0) {
        s = step(s, straight({0, 0}, {100, 0}), 0.0, 2.0, dt, kLookahead);
        t = s.time;
    }
    CHECK(t == doctest::Approx(1.0).epsilon(0.02));          // v / a
    CHECK(s.position.x == doctest::Approx(1.0).epsilon(0.03));  // v^2 / 2a
}

TEST_CASE("stepping rejects bad arguments") {
    UavState s;
    Trajectory empty;
    CHECK_THROWS(step(s, empty, 1.0, 2.0, 0.01, kLookahead));
    CHECK_THROWS(step(s, straight({0, 0}, {1, 0}), 1.0, 2.0, 0.0, kLookahead));
    CHECK_THROWS(step(s, straight({0, 0}, {1, 0}), -1.0, 2.0, 0.01, kLookahead));
}

TEST_CASE("speed changes stay within the acceleration budget under random commands") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> cmd(0.0, 3.5);
    Trajectory traj{{{0, 0}, {30, 5}, {50, 0}}, 0.0};
    UavState s;
    s.position = {0, 0};
    const double a_max = 2.0, dt = 0.01;
    for (int i = 0; i < 3000; ++i) {
        double before = s.velocity.norm();
        s = step(s, traj, cmd(rng), a_max, dt, kLookahead);
        CHECK(std::abs(s.velocity.norm() - before) <= a_max * dt + 1e-12);
    }
}

TEST_CASE("constant speed plus braking covers the reaction-plus-stop distance") {
    const double v = 2.5, a_max = 2.0, t_r = 0.4, dt = 0.01;
    Trajectory traj = straight({0, 0}, {100, 0});
    UavState s;
    s.position = {0, 0};
    s.velocity = {v, 0};
    while (s.time < t_r - 1e-9) s = step(s, traj, v, a_max, dt, kLookahead);
    while (s.velocity.norm() > 1e-9 && s.time < 10.0)
        s = step(s, traj, 0.0, a_max, dt, kLookahead);
    double expected = v * t_r + v * v / (2.0 * a_max);
    CHECK(std::abs(s.position.x - expected) <= v * dt + 1e-6);
}

TEST_CASE("the vehicle converges to the goal for any admissible command") {
    for (double v_cmd : {0.5, 2.0, 3.5}) {
        UavState s;
        s.position = {1, 1};
        Trajectory traj = straight({1, 1}, {25, 13});
        double t = fly_to_end(s, traj, v_cmd, 2.0, 0.01, 0.3, 200.0);
        CHECK(t > 0.0);
    }
}

TEST_CASE("stopping distance follows the braking parabola") {
    CHECK(emergency_stop_distance(0.0, 2.0) == doctest::Approx(0.0));
    CHECK(emergency_stop_distance(2.0, 2.0) == doctest::Approx(1.0));
    CHECK(emergency_stop_distance(3.5, 2.0) == doctest::Approx(3.0625));
}

TEST_CASE("collision detection uses a strict distance test") {
    Scenario sc;
    sc.bounds = {{0, 0}, {20, 20}};
    sc.start = {1, 1};
    sc.goal = {19, 19};

    UavState s;
    s.position = {10, 10};
    CHECK_FALSE(collision_check(s, sc, 0.3));  // empty field

    sc.obstacles.push_back(Circle{{10, 10}, 1.0});
    CHECK(collision_check(s, sc, 0.3));  // at the center

    s.position = {11.3, 10.0};  // exactly radius + clearance away
    CHECK_FALSE(collision_check(s, sc, 0.3));
    s.position = {11.29, 10.0};
    CHECK(collision_check(s, sc, 0.3));
}
