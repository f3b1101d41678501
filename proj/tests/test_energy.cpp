#include <doctest.h>

#include <map>
#include <random>

#include "eans/energy.hpp"

using namespace eans;

TEST_CASE("hovering for one second costs the base flight and idle compute power") {
    PowerModel p;  // c0 = 100, idle = 5
    EnergyLedger led;
    accrue(led, p, 0.0, false, 1.0);
    CHECK(led.flight_J == doctest::Approx(100.0));
    CHECK(led.compute_J == doctest::Approx(5.0));
}

TEST_CASE("flight power grows with the linear and cubic speed terms") {
    PowerModel p;  // c0 = 100, c1 = 5, c2 = 1
    EnergyLedger led;
    accrue(led, p, 2.0, false, 1.0);
    CHECK(led.flight_J == doctest::Approx(118.0));  // 100 + 10 + 8
}

TEST_CASE("the busy flag adds the active compute power") {
    PowerModel p;
    EnergyLedger led;
    accrue(led, p, 0.0, true, 1.0);
    CHECK(led.compute_J == doctest::Approx(20.0));  // idle 5 + active 15
}

TEST_CASE("a non-positive time step is rejected") {
    PowerModel p;
    EnergyLedger led;
    CHECK_THROWS(accrue(led, p, 1.0, false, 0.0));
    CHECK_THROWS(accrue(led, p, 1.0, false, -0.1));
}

TEST_CASE("accrual is additive in the time step") {
    PowerModel p;
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> sp(0.0, 3.5), dt(0.001, 0.5);
    std::bernoulli_distribution busy(0.5);
    for (int i = 0; i < 500; ++i) {
        double speed = sp(rng), step = dt(rng);
        bool b = busy(rng);
        EnergyLedger whole, halves;
        accrue(whole, p, speed, b, step);
        accrue(halves, p, speed, b, step / 2.0);
        accrue(halves, p, speed, b, step / 2.0);
        CHECK(std::abs(whole.flight_J - halves.flight_J) < 1e-12);
        CHECK(std::abs(whole.compute_J - halves.compute_J) < 1e-12);
    }
}

TEST_CASE("flight power is strictly increasing in speed") {
    PowerModel p;
    double prev = -1.0;
    for (double v = 0.0; v <= 3.5; v += 0.1) {
        double w = p.flight_power(v);
        CHECK(w > prev);
        prev = w;
    }
}

TEST_CASE("normalization reports each mode against the reference total") {
    std::map<std::string, EnergyLedger> ledgers;
    ledgers["baseline"] = {900.0, 100.0};
    ledgers["eans"] = {400.0, 100.0};
    ledgers["lookup"] = {600.0, 150.0};
    auto pct = normalize(ledgers);
    CHECK(pct["baseline"] == doctest::Approx(100.0));
    CHECK(pct["eans"] == doctest::Approx(50.0));
    CHECK(pct["lookup"] == doctest::Approx(75.0));
}

TEST_CASE("normalization requires a reference ledger") {
    std::map<std::string, EnergyLedger> ledgers;
    ledgers["eans"] = {400.0, 100.0};
    CHECK_THROWS(normalize(ledgers));
}

TEST_CASE("power model validation enforces sign constraints") {
    PowerModel p;
    CHECK_NOTHROW(p.validate());
    p.flight_c0 = 0.0;
    CHECK_THROWS(p.validate());
    p = PowerModel{};
    p.compute_idle = -1.0;
    CHECK_THROWS(p.validate());
}
