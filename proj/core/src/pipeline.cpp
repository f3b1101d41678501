#include "eans/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace eans {

double TimingModel::mapping_latency(double R, double d_c) const {
    double cells = (d_c / R) * (d_c / R);
    return mapping_unit_cost * cells;
}

void TimingModel::validate() const {
    if (mapping_unit_cost < 0.0 || t_p < 0.0 || t_o < 0.0)
        throw std::invalid_argument("timing: latencies must be >= 0");
}

double reaction_time(double H, int sigma, double tm_hat, double t_p, double t_o) {
    if (H <= 0.0) throw std::invalid_argument("reaction_time: H must be > 0");
    if (tm_hat > 1.0 / H + 1e-12)
        throw std::invalid_argument("reaction_time: map update exceeds update interval");
    return (sigma - 1) / H + tm_hat + t_p + t_o;
}

std::string mode_name(StrategyMode mode) {
    switch (mode) {
        case StrategyMode::Baseline: return "baseline";
        case StrategyMode::LookupTable: return "lookup";
        case StrategyMode::Eans: return "eans";
        case StrategyMode::Fixed: return "fixed";
    }
    return "unknown";
}

StrategyMode mode_from_name(const std::string& name) {
    if (name == "baseline") return StrategyMode::Baseline;
    if (name == "lookup" || name == "lookup-table") return StrategyMode::LookupTable;
    if (name == "eans") return StrategyMode::Eans;
    if (name == "fixed") return StrategyMode::Fixed;
    throw std::invalid_argument("unknown strategy mode: " + name);
}

std::string terminal_name(Terminal t) {
    switch (t) {
        case Terminal::Goal: return "goal";
        case Terminal::Collision: return "collision";
        case Terminal::Timeout: return "timeout";
        case Terminal::PlanFailure: return "plan-failure";
    }
    return "unknown";
}

void MissionConfig::validate() const {
    adapter.validate();
    timing.validate();
    power.validate();
    if (dt <= 0.0) throw std::invalid_argument("mission: dt must be > 0");
    if (uav_radius <= 0.0) throw std::invalid_argument("mission: uav_radius must be > 0");
    if (safety_margin < 0.0)
        throw std::invalid_argument("mission: safety_margin must be >= 0");
    if (timeout_factor <= 0.0)
        throw std::invalid_argument("mission: timeout_factor must be > 0");
}

namespace {
constexpr double kSqrt2 = 1.4142135623730951;

Vec2 clamp_into(const Rect& bounds, Vec2 p) {
    return {std::clamp(p.x, bounds.min.x + 1e-6, bounds.max.x - 1e-6),
            std::clamp(p.y, bounds.min.y + 1e-6, bounds.max.y - 1e-6)};
}
}  // namespace

MissionLog run_mission(const Scenario& scenario, StrategyMode mode,
                       const MissionConfig& config, std::uint64_t seed,
                       const std::string& scenario_id) {
    config.validate();
    scenario.validate(config.uav_radius);
    const AdapterConfig& ac = config.adapter;
    const double d_c = scenario.sensor.max_range;
    // Planning keeps this much clearance; the physical radius alone leaves no
    // room for path-tracking error.
    const double plan_radius = config.uav_radius + config.safety_margin;
    Vec2 origin = scenario.bounds.min;
    Vec2 size{scenario.bounds.width(), scenario.bounds.height()};
    ac.ladder.validate(size);

    std::vector<LookupRow> lookup = config.lookup;
    if (lookup.empty()) lookup = default_lookup_table(scenario.sensor.pixel_capacity);

    MissionLog log;
    log.scenario_id = scenario_id;
    log.mode = mode_name(mode);
    log.seed = seed;

    NavStrategy strategy;
    switch (mode) {
        case StrategyMode::Baseline: strategy = baseline_strategy(); break;
        case StrategyMode::LookupTable: strategy = lookup_table_strategy(0, lookup); break;
        case StrategyMode::Eans:
            // Conservative cold start; the first frame adapts it.
            strategy = {ac.v_lo, ac.frequency_list.back(), ac.ladder.finest(), false};
            break;
        case StrategyMode::Fixed: strategy = config.fixed; break;
    }

    OccupancyGrid grid(origin, size, strategy.R, ac.sigma);
    OccupancyGrid evidence(origin, size, ac.ladder.finest(), ac.sigma);

    UavState state{scenario.start, {}, 0.0};
    auto finish = [&](Terminal terminal) {
        log.terminal = terminal;
        log.flight_time_s = state.time;
        return log;
    };

    auto planned = plan(grid, scenario.start, scenario.goal, plan_radius, 0.0);
    if (!planned) {
        log.events.push_back({0.0, "warning", 0.0, "initial planning failed"});
        return finish(Terminal::PlanFailure);
    }
    Trajectory traj = std::move(*planned);

    const double straight = distance(scenario.start, scenario.goal);
    const double timeout = config.timeout_factor * straight / 0.5;
    const double dt = config.dt;
    double next_frame = 0.0;
    double busy_until = 0.0;
    int last_rho = 0;
    double last_eta = 0.0;
    double last_d = d_c;

    while (true) {
        const double t = state.time;
        if (t >= next_frame - 1e-9) {
            // Sense and integrate.
            double heading;
            if (state.velocity.norm() > 1e-6) {
                heading = std::atan2(state.velocity.y, state.velocity.x);
            } else {
                double s = project_arc_length(traj, state.position);
                Vec2 ahead = point_at_arc_length(traj, s + 2.0 * grid.cell_size());
                Vec2 dir = ahead - state.position;
                heading = dir.norm() > 1e-9 ? std::atan2(dir.y, dir.x) : 0.0;
            }
            Vec2 pose = clamp_into(scenario.bounds, state.position);
            SensorFrame frame = sense(pose, heading, scenario, t);
            auto wall_start = std::chrono::steady_clock::now();
            auto integ = grid.integrate_frame(frame);
            log.mapping_wall_s +=
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              wall_start)
                    .count();
            evidence.integrate_frame(frame);
            double tm = config.timing.mapping_latency(grid.cell_size(), d_c);
            busy_until = std::max(busy_until, t) + tm;
            log.mapping_total_sim_s += tm;
            ++log.mapping_calls;
            log.events.push_back({t, "frame", double(frame.obstacle_pixels), ""});
            last_rho = frame.obstacle_pixels;

            bool traj_blocked = cells_intersect_trajectory(
                traj, grid, integ.newly_occupied,
                plan_radius + 0.5 * grid.cell_size() * kSqrt2);

            // Risk inputs and strategy update. Risk and regridding look at
            // the path within the sensing horizon ahead; far segments get
            // replanned long before they are flown.
            double s_here = project_arc_length(traj, state.position);
            Trajectory window = sub_trajectory(traj, s_here, s_here + 2.0 * d_c);
            auto approach =
                closest_approach(window, grid, d_c, ac.ladder.finest() / 2.0);
            bool want_replan = traj_blocked;
            if (mode == StrategyMode::Eans) {
                TrajectoryMetrics rem = remaining_metrics(traj, state.position);
                if (rem.span > 1e-3) {
                    StepInputs in;
                    in.velocity = state.velocity;
                    in.approach = approach;
                    in.remaining_length = std::max(rem.length, rem.span);
                    in.remaining_span = rem.span;
                    in.rho = frame.obstacle_pixels;
                    in.rho_max = scenario.sensor.pixel_capacity;
                    in.d_c = d_c;
                    double tm_cur = config.timing.mapping_latency(grid.cell_size(), d_c);
                    in.t_r = reaction_time(strategy.H, ac.sigma, tm_cur,
                                           config.timing.t_p, config.timing.t_o);
                    in.t_p = config.timing.t_p;
                    in.t_o = config.timing.t_o;
                    in.R_current = grid.cell_size();
                    in.mapping_latency = [&](double R) {
                        return config.timing.mapping_latency(R, d_c);
                    };
                    in.frame = grid.frame();
                    StepTrace tr;
                    NavStrategy next = eans_step(in, ac, &tr);
                    last_eta = tr.risk.eta;
                    last_d = tr.risk.distance;
                    log.freq_checks.push_back({t, next.v_max, tr.risk.distance,
                                               ac.sigma, tr.tm_used, tr.ts_used,
                                               next.H, tr.frequency_forced});
                    if (tr.frequency_forced) {
                        log.events.push_back(
                            {t, "warning", next.H, "frequency bound infeasible at v_lo"});
                    }
                    if (tr.risk.zero_velocity_flagged) {
                        log.events.push_back(
                            {t, "warning", 0.0, "zero velocity with obstacle in range"});
                    }
                    want_replan = want_replan || next.replan;
                    strategy.v_max = next.v_max;
                    strategy.H = next.H;
                    if (std::abs(next.R - strategy.R) > 1e-12) {
                        OccupancyGrid regridded = evidence.resample(next.R, ac.ladder);
                        bool blocks = cells_intersect_trajectory(
                            traj, regridded, regridded.occupied_cells(),
                            plan_radius + 0.5 * regridded.cell_size() * kSqrt2);
                        // Coarsening is an economy move; it is only taken when
                        // the fattened cells leave the current path intact.
                        if (next.R < strategy.R || !blocks) {
                            strategy.R = next.R;
                            grid = std::move(regridded);
                            ++log.resolution_switches;
                            log.events.push_back({t, "resolution", next.R, ""});
                            if (blocks) want_replan = true;
                        }
                    }
                }
            } else if (mode == StrategyMode::LookupTable) {
                NavStrategy next = lookup_table_strategy(frame.obstacle_pixels, lookup);
                if (approach) {
                    auto [beta, eta] = state.velocity.norm() > 0.0
                                           ? risk_weight(state.velocity,
                                                         approach->trajectory_point -
                                                             approach->obstacle,
                                                         ac.alpha)
                                           : std::make_pair(0.0, 0.5);
                    last_eta = eta;
                    last_d = effective_distance(eta, std::min(approach->dist, d_c),
                                                d_c, ac.lambda);
                } else {
                    last_eta = 0.0;
                    last_d = d_c;
                }
                strategy.v_max = next.v_max;
                strategy.H = next.H;
                if (std::abs(next.R - strategy.R) > 1e-12) {
                    OccupancyGrid regridded = evidence.resample(next.R, ac.ladder);
                    bool blocks = cells_intersect_trajectory(
                        traj, regridded, regridded.occupied_cells(),
                        plan_radius + 0.5 * regridded.cell_size() * kSqrt2);
                    if (next.R < strategy.R || !blocks) {
                        strategy.R = next.R;
                        grid = std::move(regridded);
                        ++log.resolution_switches;
                        log.events.push_back({t, "resolution", next.R, ""});
                        if (blocks) want_replan = true;
                    }
                }
            } else {
                last_eta = approach ? 1.0 : 0.0;
                last_d = approach ? approach->dist : d_c;
            }

            if (want_replan) {
                Vec2 plan_start = clamp_into(scenario.bounds, state.position);
                auto replanned =
                    plan_details(grid, plan_start, scenario.goal, plan_radius, t);
                busy_until = std::max(busy_until, t) + config.timing.t_p;
                ++log.replans;
                log.events.push_back({t, "replan", 0.0, ""});
                if (!replanned &&
                    grid.cell_size() > ac.ladder.finest() + 1e-12) {
                    // A coarse grid can close every corridor that exists at the
                    // finest level; retry there before giving up.
                    strategy.R = ac.ladder.finest();
                    grid = evidence.resample(strategy.R, ac.ladder);
                    ++log.resolution_switches;
                    log.events.push_back(
                        {t, "resolution", strategy.R, "fallback after plan failure"});
                    replanned =
                        plan_details(grid, plan_start, scenario.goal, plan_radius, t);
                    busy_until = std::max(busy_until, t) + config.timing.t_p;
                    ++log.replans;
                    log.events.push_back({t, "replan", 0.0, ""});
                }
                if (!replanned) {
                    log.events.push_back({t, "warning", 0.0, "replanning failed"});
                    return finish(Terminal::PlanFailure);
                }
                if (replanned->relaxation_halo > 0) {
                    // The path starts inside the inflated margin; crawl until a
                    // strict replan clears the vehicle again.
                    strategy.v_max = std::min(strategy.v_max, ac.v_lo);
                    log.events.push_back({t, "warning",
                                          double(replanned->relaxation_halo),
                                          "escape plan through inflated margin"});
                }
                traj = std::move(replanned->trajectory);
            }

            // Braking governor: the risk model watches the planned path, but
            // path-tracking error can point the vehicle itself at an obstacle.
            // Cap speed so the measured gap along the motion direction always
            // covers the reaction distance plus the stopping distance.
            // Path-tracking can cut corners; crawl until the vehicle is
            // back inside half the safety margin of its path.
            if (distance(state.position, point_at_arc_length(traj, s_here)) >
                0.5 * config.safety_margin) {
                strategy.v_max = std::min(strategy.v_max, ac.v_lo);
            }
            double speed_now = state.velocity.norm();
            if (speed_now > 1e-6) {
                Vec2 vhat = state.velocity * (1.0 / speed_now);
                double min_ahead = std::numeric_limits<double>::infinity();
                for (const auto& cidx : grid.occupied_cells()) {
                    Vec2 rel = grid.index_center(cidx) - state.position;
                    double dist = rel.norm();
                    if (dist > d_c) continue;
                    if (rel.dot(vhat) < dist * 0.5) continue;  // > 60 deg off
                    min_ahead = std::min(min_ahead, dist);
                }
                if (std::isfinite(min_ahead)) {
                    double gap = min_ahead - config.uav_radius -
                                 0.5 * grid.cell_size() * kSqrt2;
                    double tm_now =
                        config.timing.mapping_latency(grid.cell_size(), d_c);
                    double t_rg = reaction_time(strategy.H, ac.sigma, tm_now,
                                                config.timing.t_p,
                                                config.timing.t_o);
                    double cap = gap > 0.0
                                     ? max_velocity_preclamp(gap, t_rg, ac.a_max)
                                     : 0.0;
                    // Small floor so a blocked vehicle can still creep while
                    // replanning reroutes it.
                    strategy.v_max = std::min(strategy.v_max, std::max(cap, 0.05));
                }
            }
            next_frame = t + 1.0 / strategy.H;
        }

        // Control and bookkeeping at dt resolution.
        double lookahead = std::max(1.5 * grid.cell_size(),
                                    std::min(state.velocity.norm() * 0.3, 0.5));
        UavState prev = state;
        state = step(state, traj, strategy.v_max, ac.a_max, dt, lookahead);
        bool busy = prev.time < busy_until - 1e-12;
        if (busy) log.busy_time_s += dt;
        accrue(log.ledger, config.power, state.velocity.norm(), busy, dt);
        log.trajectory_length_m += distance(prev.position, state.position);
        log.ticks.push_back({state.time, state.position, state.velocity.norm(),
                             strategy.v_max, strategy.H, strategy.R, busy,
                             last_rho, last_eta, last_d});
        if (collision_check(state, scenario, config.uav_radius))
            return finish(Terminal::Collision);
        if (distance(state.position, scenario.goal) <= config.uav_radius)
            return finish(Terminal::Goal);
        if (state.time >= timeout) return finish(Terminal::Timeout);
    }
}

namespace {
using nlohmann::json;
}

void write_log(const MissionLog& log, std::ostream& out) {
    json header = {{"type", "header"},       {"version", log.version},
                   {"scenario", log.scenario_id}, {"mode", log.mode},
                   {"seed", log.seed}};
    out << header.dump() << '\n';
    for (const auto& tk : log.ticks) {
        json j = {{"type", "tick"}, {"t", tk.t},       {"x", tk.position.x},
                  {"y", tk.position.y}, {"speed", tk.speed}, {"v_max", tk.v_max},
                  {"H", tk.H},      {"R", tk.R},       {"busy", tk.busy},
                  {"rho", tk.rho},  {"eta", tk.eta},   {"d", tk.d}};
        out << j.dump() << '\n';
    }
    for (const auto& ev : log.events) {
        json j = {{"type", "event"}, {"t", ev.t}, {"kind", ev.kind},
                  {"value", ev.value}, {"note", ev.note}};
        out << j.dump() << '\n';
    }
    for (const auto& fc : log.freq_checks) {
        json j = {{"type", "freq"},   {"t", fc.t},          {"v", fc.v},
                  {"d", fc.d},        {"sigma", fc.sigma},  {"tm_hat", fc.tm_hat},
                  {"ts_hat", fc.ts_hat}, {"H", fc.H},       {"forced", fc.forced}};
        out << j.dump() << '\n';
    }
    json terminal = {{"type", "terminal"},
                     {"status", terminal_name(log.terminal)},
                     {"flight_time_s", log.flight_time_s},
                     {"trajectory_length_m", log.trajectory_length_m},
                     {"flight_J", log.ledger.flight_J},
                     {"compute_J", log.ledger.compute_J},
                     {"mapping_total_sim_s", log.mapping_total_sim_s},
                     {"mapping_calls", log.mapping_calls},
                     {"busy_time_s", log.busy_time_s},
                     {"replans", log.replans},
                     {"resolution_switches", log.resolution_switches}};
    out << terminal.dump() << '\n';
}

MissionLog read_log(std::istream& in) {
    MissionLog log;
    std::string line;
    bool have_header = false, have_terminal = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        std::string type = j.at("type").get<std::string>();
        if (type == "header") {
            if (j.at("version").get<int>() != 1)
                throw std::runtime_error("log: unsupported version");
            log.scenario_id = j.at("scenario").get<std::string>();
            log.mode = j.at("mode").get<std::string>();
            log.seed = j.at("seed").get<std::uint64_t>();
            have_header = true;
        } else if (type == "tick") {
            TickRecord tk;
            tk.t = j.at("t").get<double>();
            tk.position = {j.at("x").get<double>(), j.at("y").get<double>()};
            tk.speed = j.at("speed").get<double>();
            tk.v_max = j.at("v_max").get<double>();
            tk.H = j.at("H").get<double>();
            tk.R = j.at("R").get<double>();
            tk.busy = j.at("busy").get<bool>();
            tk.rho = j.at("rho").get<int>();
            tk.eta = j.at("eta").get<double>();
            tk.d = j.at("d").get<double>();
            log.ticks.push_back(tk);
        } else if (type == "event") {
            log.events.push_back({j.at("t").get<double>(),
                                  j.at("kind").get<std::string>(),
                                  j.at("value").get<double>(),
                                  j.at("note").get<std::string>()});
        } else if (type == "freq") {
            log.freq_checks.push_back(
                {j.at("t").get<double>(), j.at("v").get<double>(),
                 j.at("d").get<double>(), j.at("sigma").get<int>(),
                 j.at("tm_hat").get<double>(), j.at("ts_hat").get<double>(),
                 j.at("H").get<double>(), j.at("forced").get<bool>()});
        } else if (type == "terminal") {
            std::string st = j.at("status").get<std::string>();
            if (st == "goal") log.terminal = Terminal::Goal;
            else if (st == "collision") log.terminal = Terminal::Collision;
            else if (st == "timeout") log.terminal = Terminal::Timeout;
            else if (st == "plan-failure") log.terminal = Terminal::PlanFailure;
            else throw std::runtime_error("log: unknown terminal status");
            log.flight_time_s = j.at("flight_time_s").get<double>();
            log.trajectory_length_m = j.at("trajectory_length_m").get<double>();
            log.ledger.flight_J = j.at("flight_J").get<double>();
            log.ledger.compute_J = j.at("compute_J").get<double>();
            log.mapping_total_sim_s = j.at("mapping_total_sim_s").get<double>();
            log.mapping_calls = j.at("mapping_calls").get<int>();
            log.busy_time_s = j.at("busy_time_s").get<double>();
            log.replans = j.at("replans").get<int>();
            log.resolution_switches = j.at("resolution_switches").get<int>();
            have_terminal = true;
        } else {
            throw std::runtime_error("log: unknown record type " + type);
        }
    }
    if (!have_header || !have_terminal)
        throw std::runtime_error("log: missing header or terminal record");
    return log;
}

}  // namespace eans
