#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eans/adapters.hpp"
#include "eans/dynamics.hpp"
#include "eans/energy.hpp"

namespace eans {

struct TimingModel {
    double mapping_unit_cost = 2e-6;  // seconds per cell in the sensed footprint
    double t_p = 0.02;                // planning latency, seconds
    double t_o = 0.005;               // command conversion, seconds

    // t^_m = unit_cost * (d_c / R)^2, strictly decreasing in R.
    double mapping_latency(double R, double d_c) const;
    void validate() const;
};

// t_r = (sigma - 1)/H + t^_m + t_p + t_o. Throws when one map update cannot
// fit into the update interval (t^_m > 1/H).
double reaction_time(double H, int sigma, double tm_hat, double t_p, double t_o);

enum class StrategyMode { Baseline, LookupTable, Eans, Fixed };
std::string mode_name(StrategyMode mode);
StrategyMode mode_from_name(const std::string& name);

struct MissionConfig {
    AdapterConfig adapter;
    TimingModel timing;
    PowerModel power;
    double dt = 0.01;
    double uav_radius = 0.3;
    double safety_margin = 0.2;    // extra planning clearance beyond the radius
    double timeout_factor = 10.0;  // times the baseline straight-line time
    std::vector<LookupRow> lookup;  // empty: derived from the sensor capacity
    NavStrategy fixed{0.5, 30.0, 0.1, false};

    void validate() const;
};

enum class Terminal { Goal, Collision, Timeout, PlanFailure };
std::string terminal_name(Terminal t);

struct TickRecord {
    double t = 0.0;
    Vec2 position;
    double speed = 0.0;
    double v_max = 0.0;
    double H = 0.0;
    double R = 0.0;
    bool busy = false;
    int rho = 0;
    double eta = 0.0;
    double d = 0.0;
};

struct EventRecord {
    double t = 0.0;
    std::string kind;  // frame | replan | resolution | warning
    double value = 0.0;
    std::string note;
};

// One frequency-bound input tuple per strategy update, for the
// independent conformance checker.
struct FreqCheckRecord {
    double t = 0.0;
    double v = 0.0;
    double d = 0.0;
    int sigma = 0;
    double tm_hat = 0.0;
    double ts_hat = 0.0;
    double H = 0.0;
    bool forced = false;
};

struct MissionLog {
    int version = 1;
    std::string scenario_id;
    std::string mode;
    std::uint64_t seed = 0;
    std::vector<TickRecord> ticks;
    std::vector<EventRecord> events;
    std::vector<FreqCheckRecord> freq_checks;
    Terminal terminal = Terminal::Timeout;
    EnergyLedger ledger;
    double flight_time_s = 0.0;
    double trajectory_length_m = 0.0;  // actually flown path length
    double mapping_total_sim_s = 0.0;
    int mapping_calls = 0;
    double busy_time_s = 0.0;
    int replans = 0;
    int resolution_switches = 0;
    // Wall-clock of the real mapping routine; diagnostic only, never
    // serialized (logs must be reproducible byte for byte).
    double mapping_wall_s = 0.0;
};

MissionLog run_mission(const Scenario& scenario, StrategyMode mode,
                       const MissionConfig& config, std::uint64_t seed,
                       const std::string& scenario_id = "scenario");

// Line-delimited records with a versioned header.
void write_log(const MissionLog& log, std::ostream& out);
MissionLog read_log(std::istream& in);

}  // namespace eans
