#include <doctest.h>

#include <cmath>
#include <random>

#include "eans/adapters.hpp"

using namespace eans;

namespace {

AdapterConfig defaults() { return AdapterConfig{}; }

StepInputs open_space_inputs(double d_c = 5.0) {
    StepInputs in;
    in.velocity = {1.0, 0.0};
    in.approach = std::nullopt;
    in.remaining_length = 30.0;
    in.remaining_span = 30.0;
    in.rho = 0;
    in.rho_max = 64;
    in.d_c = d_c;
    in.t_r = 0.25;
    in.t_p = 0.02;
    in.t_o = 0.005;
    in.R_current = 0.1;
    in.mapping_latency = [d_c](double R) { return 2e-6 * (d_c / R) * (d_c / R); };
    in.frame = GridFrame{{0, 0}, {40, 20}};
    return in;
}

}  // namespace

TEST_CASE("risk weight is the sigmoid of the velocity/gradient cosine") {
    // Perpendicular: cosine 0, sigmoid midpoint.
    auto [b0, e0] = risk_weight({1, 0}, {0, 1}, 3.0);
    CHECK(b0 == doctest::Approx(0.0));
    CHECK(e0 == doctest::Approx(0.5));

    // Flying straight at the obstacle: the gradient points back at the
    // vehicle, cosine -1.
    auto [b1, e1] = risk_weight({1, 0}, {-1, 0}, 3.0);
    CHECK(b1 == doctest::Approx(-1.0));
    CHECK(e1 == doctest::Approx(0.95257).epsilon(1e-5));

    // Zero-length velocity degenerates to the midpoint.
    auto [b2, e2] = risk_weight({0, 0}, {-1, 0}, 3.0);
    CHECK(b2 == doctest::Approx(0.0));
    CHECK(e2 == doctest::Approx(0.5));
}

TEST_CASE("risk weight is scale invariant and antisymmetric in the cosine") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> c(-3.0, 3.0), scale(0.01, 50.0);
    for (int i = 0; i < 1000; ++i) {
        Vec2 v{c(rng), c(rng)}, g{c(rng), c(rng)};
        if (v.norm() < 1e-6 || g.norm() < 1e-6) continue;
        double alpha = std::abs(c(rng)) + 0.1;
        auto [beta, eta] = risk_weight(v, g, alpha);
        CHECK(beta >= -1.0);
        CHECK(beta <= 1.0);
        CHECK(eta >= 0.0);
        CHECK(eta <= 1.0);
        auto [beta_s, eta_s] = risk_weight(v * scale(rng), g * scale(rng), alpha);
        CHECK(beta_s == doctest::Approx(beta).epsilon(1e-9));
        CHECK(eta_s == doctest::Approx(eta).epsilon(1e-9));
        // Reversing the gradient flips the cosine and mirrors the weight.
        auto [beta_r, eta_r] = risk_weight(v, g * -1.0, alpha);
        CHECK(beta_r == doctest::Approx(-beta).epsilon(1e-9));
        CHECK(eta_r == doctest::Approx(1.0 - eta).epsilon(1e-9));
    }
}

TEST_CASE("risk weight strictly decreases as the cosine grows") {
    double prev = 2.0;
    for (double beta = -1.0; beta <= 1.0; beta += 0.05) {
        // Construct vectors realizing this cosine.
        Vec2 v{1, 0}, g{beta, std::sqrt(std::max(0.0, 1.0 - beta * beta))};
        auto [b, eta] = risk_weight(v, g, 3.0);
        CHECK(b == doctest::Approx(beta).epsilon(1e-9));
        CHECK(eta < prev);
        prev = eta;
    }
}

TEST_CASE("effective distance blends the range and the measured gap") {
    CHECK(effective_distance(0.0, 5.0, 5.0, 0.5) == doctest::Approx(5.0));
    CHECK(effective_distance(0.95257, 2.0, 5.0, 0.5) ==
          doctest::Approx(1.1186).epsilon(1e-4));
    // At full risk with the blend pushed to its range side, almost nothing
    // of the measured gap survives.
    CHECK(effective_distance(1.0, 2.0, 5.0, 0.999) ==
          doctest::Approx(0.001 * 2.0).epsilon(1e-6));
}

TEST_CASE("effective distance stays within the sensing range") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double d_c = 0.5 + 10.0 * u(rng);
        double d = effective_distance(u(rng), d_c * u(rng), d_c,
                                      0.001 + 0.998 * u(rng));
        CHECK(d >= 0.0);
        CHECK(d <= d_c);
    }
}

TEST_CASE("velocity bound inverts the reaction-plus-stop distance exactly") {
    // No reaction lag: pure stopping distance.
    CHECK(max_velocity_preclamp(10.0, 0.0, 2.0) ==
          doctest::Approx(std::sqrt(40.0)).epsilon(1e-12));
    // Clamping caps the command at the allowed range.
    VelocityBound vb = max_velocity(10.0, 0.0, 2.0, 0.5, 3.5);
    CHECK(vb.v == doctest::Approx(3.5));
    CHECK_FALSE(vb.replan);

    double v = max_velocity_preclamp(10.0, 0.5, 2.0);
    CHECK(v == doctest::Approx(std::sqrt(41.0) - 1.0).epsilon(1e-9));
    CHECK(v * 0.5 + v * v / 4.0 == doctest::Approx(10.0).epsilon(1e-9));

    // A collapsed distance forces the floor speed and flags a replan.
    vb = max_velocity(0.0, 0.5, 2.0, 0.5, 3.5);
    CHECK(vb.v == doctest::Approx(0.5));
    CHECK(vb.replan);
}

TEST_CASE("velocity bound identity holds across random inputs") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> dd(0.5, 20.0), aa(0.5, 5.0), tt(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double d = dd(rng), a = aa(rng), t = tt(rng);
        double v = max_velocity_preclamp(d, t, a);
        CHECK(std::abs(v * t + v * v / (2.0 * a) - d) < 1e-9);
    }
}

TEST_CASE("frequency selection returns the cheapest admissible rate") {
    std::vector<double> list{5, 10, 15, 20, 25, 30};
    // A single capture needs no spacing: the cheapest entry wins.
    auto h = frequency_select(2.0, 10.0, 1, 2.0, 0.02, 0.02, 0.01, list);
    REQUIRE(h.has_value());
    CHECK(*h == doctest::Approx(5.0));

    // Multi-capture case: the lower bound is 16/35.6 Hz, far below the list.
    h = frequency_select(2.0, 10.0, 3, 2.0, 0.02, 0.02, 0.01, list);
    REQUIRE(h.has_value());
    CHECK(*h == doctest::Approx(5.0));

    // Too fast for the available distance: no rate can help.
    CHECK_FALSE(frequency_select(7.0, 10.0, 3, 2.0, 0.02, 0.02, 0.01, list)
                    .has_value());

    // A long map update caps the rate from above.
    h = frequency_select(2.0, 10.0, 3, 2.0, 0.15, 0.02, 0.01, list);
    REQUIRE(h.has_value());
    CHECK(*h <= 1.0 / 0.15 + 1e-9);
}

TEST_CASE("frequency selection agrees with a brute-force list scan") {
    std::vector<double> list{5, 10, 15, 20, 25, 30};
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> vv(0.3, 4.0), dd(0.5, 15.0),
        tm(0.001, 0.05);
    std::uniform_int_distribution<int> ss(1, 5);
    for (int i = 0; i < 1000; ++i) {
        double v = vv(rng), d = dd(rng), tmh = tm(rng);
        int sigma = ss(rng);
        const double a = 2.0, t_p = 0.02, t_o = 0.005;
        auto got = frequency_select(v, d, sigma, a, tmh, t_p, t_o, list);

        // Oracle: scan the list against the two inequalities directly.
        double ts = tmh + t_p + t_o;
        double denom = 2.0 * d * a - v * v - 2.0 * a * v * ts;
        std::optional<double> expect;
        if (sigma == 1 || denom > 0.0) {
            double h_min = sigma == 1 ? 0.0 : 2.0 * (sigma - 1) * a * v / denom;
            for (double h : list) {
                if (h + 1e-12 >= h_min && tmh <= 1.0 / h + 1e-12) {
                    expect = h;
                    break;
                }
            }
        }
        CHECK(got.has_value() == expect.has_value());
        if (got && expect) CHECK(*got == doctest::Approx(*expect));
    }
}

TEST_CASE("optimal length scales the span by the observed obstacle load") {
    CHECK(optimal_length(20.0, 0, 64, 1.0) == doctest::Approx(20.0));
    CHECK(optimal_length(20.0, 64, 64, 1.0) == doctest::Approx(40.0));
    CHECK(optimal_length(20.0, 30, 100, 1.0) == doctest::Approx(26.0));
    CHECK_THROWS(optimal_length(20.0, 3, 0, 1.0));
}

TEST_CASE("trajectory probability decays past the optimal length and clamps below it") {
    CHECK(trajectory_probability(26.0, 26.0, 20.0, 2.0) == doctest::Approx(1.0));
    CHECK(trajectory_probability(30.0, 26.0, 20.0, 2.0) ==
          doctest::Approx(std::exp(-0.4)).epsilon(1e-5));
    CHECK(trajectory_probability(10.0, 26.0, 20.0, 2.0) == doctest::Approx(1.0));

    double prev = 1.0;
    for (double len = 26.0; len < 60.0; len += 0.5) {
        double p = trajectory_probability(len + 0.5, 26.0, 20.0, 2.0);
        CHECK(p < prev);
        CHECK(p > 0.0);
        prev = p;
    }
}

TEST_CASE("scalar formulas match direct evaluation on random inputs") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double eta = u(rng), dist = 10.0 * u(rng), d_c = 10.0,
               lam = 0.001 + 0.998 * u(rng);
        double want = std::clamp(lam * (1.0 - eta) * d_c + (1.0 - lam) * dist,
                                 0.0, d_c);
        CHECK(effective_distance(eta, dist, d_c, lam) ==
              doctest::Approx(want).epsilon(1e-9));

        double span = 1.0 + 30.0 * u(rng);
        int rho_max = 64;
        int rho = int(rho_max * u(rng));
        double gamma = 0.1 + 3.0 * u(rng);
        CHECK(optimal_length(span, rho, rho_max, gamma) ==
              doctest::Approx((1.0 + gamma * rho / double(rho_max)) * span)
                  .epsilon(1e-9));

        double opt = span * (1.0 + u(rng)), len = opt + 20.0 * u(rng),
               eps = 0.1 + 4.0 * u(rng);
        CHECK(trajectory_probability(len, opt, span, eps) ==
              doctest::Approx(std::exp(-(eps / span) * (len - opt))).epsilon(1e-9));
    }
}

TEST_CASE("resolution coarsens while the endpoint cells stay disjoint") {
    GridFrame frame{{0, 0}, {40, 20}};
    ResolutionLadder ladder{{0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}};
    // Endpoints one fine cell apart: disjoint at 0.10 and 0.15, merged at
    // 0.20 -- the last level that kept them apart is retained.
    Vec2 pt{0.29, 0.05}, po{0.31, 0.05};
    REQUIRE(frame.manhattan_distance(pt, po, 0.15) > 0);
    REQUIRE(frame.manhattan_distance(pt, po, 0.20) == 0);
    auto choice = adapt_resolution(0.9, std::make_pair(pt, po), frame, ladder, 0.6);
    CHECK(choice.r_c == doctest::Approx(0.15));
    CHECK_FALSE(choice.replan);
}

TEST_CASE("a low trajectory probability forces the finest resolution and a replan") {
    GridFrame frame{{0, 0}, {40, 20}};
    ResolutionLadder ladder{{0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}};
    auto choice = adapt_resolution(0.3, std::make_pair(Vec2{1, 1}, Vec2{5, 5}),
                                   frame, ladder, 0.6);
    CHECK(choice.r_c == doctest::Approx(0.1));
    CHECK(choice.replan);
}

TEST_CASE("far-apart endpoints allow the coarsest resolution") {
    GridFrame frame{{0, 0}, {40, 20}};
    ResolutionLadder ladder{{0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}};
    auto choice = adapt_resolution(0.9, std::make_pair(Vec2{1, 1}, Vec2{20, 15}),
                                   frame, ladder, 0.6);
    CHECK(choice.r_c == doctest::Approx(0.5));
    CHECK_FALSE(choice.replan);

    // With no obstacle in range there is nothing to keep apart.
    choice = adapt_resolution(0.9, std::nullopt, frame, ladder, 0.6);
    CHECK(choice.r_c == doctest::Approx(0.5));
    CHECK_FALSE(choice.replan);
}

TEST_CASE("an accepted coarsening always keeps the endpoint cells disjoint") {
    GridFrame frame{{0, 0}, {40, 20}};
    ResolutionLadder ladder{{0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}};
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> x(0.0, 39.9), y(0.0, 19.9);
    for (int i = 0; i < 1000; ++i) {
        Vec2 pt{x(rng), y(rng)}, po{x(rng), y(rng)};
        auto choice = adapt_resolution(0.9, std::make_pair(pt, po), frame, ladder, 0.6);
        CHECK_FALSE(choice.replan);
        if (choice.r_c > ladder.finest() + 1e-12) {
            CHECK(frame.manhattan_distance(pt, po, choice.r_c) > 0);
        }
    }
}

TEST_CASE("the full adapter step picks the fast/cheap/coarse strategy in open space") {
    AdapterConfig cfg = defaults();
    StepTrace trace;
    NavStrategy s = eans_step(open_space_inputs(), cfg, &trace);
    CHECK(s.v_max == doctest::Approx(3.5));
    CHECK(s.R == doctest::Approx(0.5));
    CHECK_FALSE(s.replan);
    CHECK(trace.risk.eta == doctest::Approx(0.0));
    CHECK(trace.risk.distance == doctest::Approx(5.0));  // full sensing range
    // The selected rate is the cheapest list entry admissible for 3.5 m/s.
    auto oracle = frequency_select(3.5, 5.0, cfg.sigma, cfg.a_max, trace.tm_used,
                                   0.02, 0.005, cfg.frequency_list);
    REQUIRE(oracle.has_value());
    CHECK(s.H == doctest::Approx(*oracle));
}

TEST_CASE("an obstacle dead ahead slows the vehicle and refines the map") {
    AdapterConfig cfg = defaults();
    StepInputs in = open_space_inputs();
    in.velocity = {2.0, 0.0};
    // The planned path grazes an obstacle just ahead: nearest path point
    // (11.8, 5), nearest occupied cell center (11.9, 5).
    in.approach = ClosestApproach{{11.8, 5}, {11.9, 5}, 0.1};
    StepTrace trace;
    NavStrategy s = eans_step(in, cfg, &trace);

    NavStrategy open = eans_step(open_space_inputs(), cfg);
    CHECK(s.v_max < open.v_max);
    CHECK(s.R < open.R);
    CHECK(trace.risk.eta > 0.9);  // flying straight at it
    // The emitted tuple satisfies the spacing bound it was derived from.
    double d = trace.risk.distance;
    double ts = trace.ts_used;
    double lower = 2.0 * (cfg.sigma - 1) * cfg.a_max * s.v_max /
                   (2.0 * d * cfg.a_max - s.v_max * s.v_max -
                    2.0 * cfg.a_max * s.v_max * ts);
    CHECK(s.H + 1e-9 >= lower);
}

TEST_CASE("a detouring trajectory triggers the replan branch") {
    AdapterConfig cfg = defaults();
    StepInputs in = open_space_inputs();
    in.approach = ClosestApproach{{10, 5}, {12, 5}, 2.0};
    in.remaining_span = 10.0;
    in.remaining_length = 40.0;  // far beyond any acceptable detour
    NavStrategy s = eans_step(in, cfg);
    CHECK(s.R == doctest::Approx(cfg.ladder.finest()));
    CHECK(s.replan);
}

TEST_CASE("the adapter step always emits a valid strategy") {
    AdapterConfig cfg = defaults();
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        StepInputs in = open_space_inputs();
        in.velocity = {4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0};
        if (u(rng) < 0.7) {
            Vec2 pt{40.0 * u(rng), 20.0 * u(rng)};
            Vec2 po{40.0 * u(rng), 20.0 * u(rng)};
            in.approach = ClosestApproach{pt, po, std::min(distance(pt, po), in.d_c)};
        }
        in.remaining_span = 1.0 + 30.0 * u(rng);
        in.remaining_length = in.remaining_span * (1.0 + u(rng));
        in.rho = int(64 * u(rng));
        in.t_r = u(rng);
        in.R_current = cfg.ladder.levels[std::size_t(u(rng) * 8.999)];
        NavStrategy s = eans_step(in, cfg);
        CHECK(s.v_max >= cfg.v_lo - 1e-12);
        CHECK(s.v_max <= cfg.v_hi + 1e-12);
        CHECK(cfg.ladder.contains(s.R));
        bool listed = false;
        for (double h : cfg.frequency_list)
            if (std::abs(h - s.H) < 1e-9) listed = true;
        CHECK(listed);
    }
}

TEST_CASE("the threshold table walks from sparse to dense rows") {
    auto rows = default_lookup_table(64);
    NavStrategy sparse = lookup_table_strategy(0, rows);
    CHECK(sparse.v_max == doctest::Approx(2.5));
    CHECK(sparse.H == doctest::Approx(5.0));
    CHECK(sparse.R == doctest::Approx(0.5));

    NavStrategy dense = lookup_table_strategy(64, rows);
    CHECK(dense.v_max == doctest::Approx(0.5));
    CHECK(dense.H == doctest::Approx(30.0));
    CHECK(dense.R == doctest::Approx(0.1));

    // A count exactly on a cutoff belongs to the lower (sparser) row.
    NavStrategy edge = lookup_table_strategy(int(0.10 * 64), rows);
    CHECK(edge.v_max == doctest::Approx(2.0));

    CHECK_THROWS(lookup_table_strategy(65, rows));
}

TEST_CASE("the static strategy never changes") {
    NavStrategy a = baseline_strategy();
    NavStrategy b = baseline_strategy();
    CHECK(a.v_max == doctest::Approx(0.5));
    CHECK(a.H == doctest::Approx(30.0));
    CHECK(a.R == doctest::Approx(0.1));
    CHECK_FALSE(a.replan);
    CHECK(b.v_max == a.v_max);
    CHECK(b.H == a.H);
    CHECK(b.R == a.R);
}

TEST_CASE("adapter configuration bounds are enforced") {
    AdapterConfig c = defaults();
    CHECK_NOTHROW(c.validate());
    c.lambda = 1.0;
    CHECK_THROWS(c.validate());
    c = defaults();
    c.phi = 0.0;
    CHECK_THROWS(c.validate());
    c = defaults();
    c.frequency_list = {10, 5};
    CHECK_THROWS(c.validate());
    c = defaults();
    c.v_lo = 4.0;
    CHECK_THROWS(c.validate());
}
