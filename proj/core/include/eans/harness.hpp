#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eans/pipeline.hpp"

namespace eans {

struct MetricsRow {
    std::string mode;
    std::string scenario_id;
    std::uint64_t seed = 0;
    double mapping_total_ms = 0.0;
    double mapping_avg_ms = 0.0;
    double compute_busy_pct = 0.0;  // simulated busy fraction, not real CPU %
    double trajectory_length_m = 0.0;
    double flight_time_s = 0.0;
    std::optional<double> energy_pct;  // only when a baseline row exists
    std::string terminal;
    double density = -1.0;  // set by density_sweep rows only
};

struct AggregateRow {
    std::string scenario_id;
    std::string mode;
    int missions = 0;
    double mapping_total_ms = 0.0;
    double mapping_avg_ms = 0.0;
    double compute_busy_pct = 0.0;
    double trajectory_length_m = 0.0;
    double flight_time_s = 0.0;
    std::optional<double> energy_pct;
    int goals = 0;
    int collisions = 0;
};

struct BatchSpec {
    std::vector<std::pair<std::string, Scenario>> scenarios;
    std::vector<StrategyMode> modes;
    std::vector<std::uint64_t> seeds;
    MissionConfig config;
    int jobs = 1;
};

struct BatchResult {
    std::vector<MetricsRow> rows;        // sorted by (scenario, mode, seed)
    std::vector<AggregateRow> aggregates;
    std::vector<MissionLog> logs;        // same order as rows
    bool any_collision = false;
};

BatchResult run_batch(const BatchSpec& spec);

std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

struct SweepSpec {
    std::vector<double> densities;  // in [0, 0.4]
    std::vector<StrategyMode> modes;
    int replicates = 1;
    MissionConfig config;
    GenParams base;  // bounds/sensor template; densities and seeds filled in
    int jobs = 1;
};

struct SweepResult {
    // Long-form rows: one per (density, mode, seed). Infeasible generation
    // at a density produces a warning row instead (terminal = "generation-skip").
    std::vector<MetricsRow> rows;
    std::vector<std::string> warnings;
};

SweepResult density_sweep(const SweepSpec& spec);
std::string sweep_csv(const SweepResult& result);

enum class TraceKind { VelocityCurve, BusyCurve, PathHeatmap };
TraceKind trace_kind_from_name(const std::string& name);
void export_trace(const MissionLog& log, TraceKind kind, std::ostream& out);

}  // namespace eans
