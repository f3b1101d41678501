#include "eans/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace eans {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct Job {
    const Scenario* scenario = nullptr;
    std::string scenario_id;
    StrategyMode mode = StrategyMode::Baseline;
    std::uint64_t seed = 0;
    double density = -1.0;
};

MetricsRow row_from_log(const MissionLog& log, double density) {
    MetricsRow row;
    row.mode = log.mode;
    row.scenario_id = log.scenario_id;
    row.seed = log.seed;
    row.mapping_total_ms = log.mapping_total_sim_s * 1e3;
    row.mapping_avg_ms =
        log.mapping_calls > 0 ? row.mapping_total_ms / log.mapping_calls : 0.0;
    row.compute_busy_pct =
        log.flight_time_s > 0.0 ? log.busy_time_s / log.flight_time_s * 100.0 : 0.0;
    row.trajectory_length_m = log.trajectory_length_m;
    row.flight_time_s = log.flight_time_s;
    row.terminal = terminal_name(log.terminal);
    row.density = density;
    return row;
}

// Runs jobs on a bounded worker pool; output order is the job order, so the
// result is independent of scheduling.
std::vector<MissionLog> run_jobs(const std::vector<Job>& jobs,
                                 const MissionConfig& config, int n_jobs) {
    std::vector<MissionLog> logs(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            const Job& job = jobs[i];
            logs[i] = run_mission(*job.scenario, job.mode, config, job.seed,
                                  job.scenario_id);
        }
    };
    int n = std::max(1, n_jobs);
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return logs;
}

void fill_energy_pct(std::vector<MetricsRow>& rows,
                     const std::vector<MissionLog>& logs) {
    // Normalize against the baseline mission with the same scenario and seed.
    std::map<std::pair<std::string, std::uint64_t>, double> baseline_total;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].mode == "baseline") {
            baseline_total[{rows[i].scenario_id, rows[i].seed}] =
                logs[i].ledger.total();
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto it = baseline_total.find({rows[i].scenario_id, rows[i].seed});
        if (it != baseline_total.end() && it->second > 0.0) {
            rows[i].energy_pct = logs[i].ledger.total() / it->second * 100.0;
        }
    }
}

}  // namespace

BatchResult run_batch(const BatchSpec& spec) {
    if (spec.scenarios.empty() || spec.modes.empty() || spec.seeds.empty())
        throw std::invalid_argument("batch: need >= 1 scenario, mode, and seed");
    spec.config.validate();

    std::vector<Job> jobs;
    for (const auto& [id, scenario] : spec.scenarios) {
        for (StrategyMode mode : spec.modes) {
            for (std::uint64_t seed : spec.seeds) {
                jobs.push_back({&scenario, id, mode, seed, -1.0});
            }
        }
    }
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        if (a.scenario_id != b.scenario_id) return a.scenario_id < b.scenario_id;
        if (a.mode != b.mode) return mode_name(a.mode) < mode_name(b.mode);
        return a.seed < b.seed;
    });

    BatchResult result;
    result.logs = run_jobs(jobs, spec.config, spec.jobs);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        result.rows.push_back(row_from_log(result.logs[i], -1.0));
        if (result.logs[i].terminal == Terminal::Collision) result.any_collision = true;
    }
    fill_energy_pct(result.rows, result.logs);

    // Aggregate means per (scenario, mode), recomputed from the raw rows.
    std::map<std::pair<std::string, std::string>, AggregateRow> agg;
    std::map<std::pair<std::string, std::string>, int> energy_counts;
    for (const auto& row : result.rows) {
        auto& a = agg[{row.scenario_id, row.mode}];
        a.scenario_id = row.scenario_id;
        a.mode = row.mode;
        ++a.missions;
        a.mapping_total_ms += row.mapping_total_ms;
        a.mapping_avg_ms += row.mapping_avg_ms;
        a.compute_busy_pct += row.compute_busy_pct;
        a.trajectory_length_m += row.trajectory_length_m;
        a.flight_time_s += row.flight_time_s;
        if (row.energy_pct) {
            a.energy_pct = a.energy_pct.value_or(0.0) + *row.energy_pct;
            ++energy_counts[{row.scenario_id, row.mode}];
        }
        if (row.terminal == "goal") ++a.goals;
        if (row.terminal == "collision") ++a.collisions;
    }
    for (auto& [key, a] : agg) {
        a.mapping_total_ms /= a.missions;
        a.mapping_avg_ms /= a.missions;
        a.compute_busy_pct /= a.missions;
        a.trajectory_length_m /= a.missions;
        a.flight_time_s /= a.missions;
        if (a.energy_pct) a.energy_pct = *a.energy_pct / energy_counts[key];
        result.aggregates.push_back(a);
    }
    return result;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << "mode,scenario,seed,mapping_total_ms,mapping_avg_ms,compute_busy_pct,"
           "trajectory_length_m,flight_time_s,energy_pct,terminal\n";
    for (const auto& r : rows) {
        out << r.mode << ',' << r.scenario_id << ',' << r.seed << ','
            << fmt(r.mapping_total_ms) << ',' << fmt(r.mapping_avg_ms) << ','
            << fmt(r.compute_busy_pct) << ',' << fmt(r.trajectory_length_m) << ','
            << fmt(r.flight_time_s) << ','
            << (r.energy_pct ? fmt(*r.energy_pct) : std::string()) << ','
            << r.terminal << '\n';
    }
    return out.str();
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    out << "scenario,mode,missions,mapping_total_ms,mapping_avg_ms,"
           "compute_busy_pct,trajectory_length_m,flight_time_s,energy_pct,"
           "goals,collisions\n";
    for (const auto& r : rows) {
        out << r.scenario_id << ',' << r.mode << ',' << r.missions << ','
            << fmt(r.mapping_total_ms) << ',' << fmt(r.mapping_avg_ms) << ','
            << fmt(r.compute_busy_pct) << ',' << fmt(r.trajectory_length_m) << ','
            << fmt(r.flight_time_s) << ','
            << (r.energy_pct ? fmt(*r.energy_pct) : std::string()) << ','
            << r.goals << ',' << r.collisions << '\n';
    }
    return out.str();
}

SweepResult density_sweep(const SweepSpec& spec) {
    if (spec.densities.empty() || spec.modes.empty() || spec.replicates < 1)
        throw std::invalid_argument("sweep: need densities, modes, replicates >= 1");
    for (double d : spec.densities) {
        if (d < 0.0 || d > 0.4)
            throw std::invalid_argument("sweep: densities must be in [0, 0.4]");
    }
    spec.config.validate();

    SweepResult result;
    std::vector<Job> jobs;
    std::vector<Scenario> scenarios;  // stable storage for job pointers
    scenarios.reserve(spec.densities.size() * spec.replicates);
    struct Pending {
        std::size_t scenario_idx;
        std::string id;
        double density;
        std::uint64_t seed;
    };
    std::vector<Pending> pendings;
    for (std::size_t di = 0; di < spec.densities.size(); ++di) {
        double density = spec.densities[di];
        for (int rep = 0; rep < spec.replicates; ++rep) {
            std::uint64_t seed = spec.base.seed + 1000 * di + rep;
            GenParams params = spec.base;
            params.zone_densities = {density};
            params.seed = seed;
            char id[64];
            std::snprintf(id, sizeof(id), "density-%.2f", density);
            try {
                scenarios.push_back(generate_scenario(params));
            } catch (const GenerationError& e) {
                result.warnings.push_back(std::string(id) + " seed " +
                                          std::to_string(seed) + ": " + e.what());
                MetricsRow row;
                row.scenario_id = id;
                row.seed = seed;
                row.density = density;
                row.terminal = "generation-skip";
                result.rows.push_back(row);
                continue;
            }
            pendings.push_back({scenarios.size() - 1, id, density, seed});
        }
    }
    for (const auto& p : pendings) {
        for (StrategyMode mode : spec.modes) {
            jobs.push_back({&scenarios[p.scenario_idx], p.id, mode, p.seed, p.density});
        }
    }
    std::vector<MissionLog> logs = run_jobs(jobs, spec.config, spec.jobs);
    std::vector<MetricsRow> run_rows;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        run_rows.push_back(row_from_log(logs[i], jobs[i].density));
    }
    fill_energy_pct(run_rows, logs);
    for (auto& row : run_rows) result.rows.push_back(std::move(row));
    std::sort(result.rows.begin(), result.rows.end(),
              [](const MetricsRow& a, const MetricsRow& b) {
                  if (a.density != b.density) return a.density < b.density;
                  if (a.mode != b.mode) return a.mode < b.mode;
                  return a.seed < b.seed;
              });
    return result;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "density,mode,scenario,seed,mapping_total_ms,mapping_avg_ms,"
           "compute_busy_pct,trajectory_length_m,flight_time_s,energy_pct,"
           "terminal\n";
    for (const auto& r : result.rows) {
        out << fmt(r.density) << ',' << r.mode << ',' << r.scenario_id << ','
            << r.seed << ',' << fmt(r.mapping_total_ms) << ','
            << fmt(r.mapping_avg_ms) << ',' << fmt(r.compute_busy_pct) << ','
            << fmt(r.trajectory_length_m) << ',' << fmt(r.flight_time_s) << ','
            << (r.energy_pct ? fmt(*r.energy_pct) : std::string()) << ','
            << r.terminal << '\n';
    }
    return out.str();
}

TraceKind trace_kind_from_name(const std::string& name) {
    if (name == "velocity-curve") return TraceKind::VelocityCurve;
    if (name == "busy-curve") return TraceKind::BusyCurve;
    if (name == "path-heatmap") return TraceKind::PathHeatmap;
    throw std::invalid_argument("unknown trace kind: " + name);
}

void export_trace(const MissionLog& log, TraceKind kind, std::ostream& out) {
    switch (kind) {
        case TraceKind::VelocityCurve:
            out << "time,x,y,speed,busy,H,R\n";
            for (const auto& tk : log.ticks) {
                out << fmt(tk.t) << ',' << fmt(tk.position.x) << ','
                    << fmt(tk.position.y) << ',' << fmt(tk.speed) << ','
                    << (tk.busy ? 1 : 0) << ',' << fmt(tk.H) << ',' << fmt(tk.R)
                    << '\n';
            }
            break;
        case TraceKind::BusyCurve:
            out << "time,busy,H,R\n";
            for (const auto& tk : log.ticks) {
                out << fmt(tk.t) << ',' << (tk.busy ? 1 : 0) << ',' << fmt(tk.H)
                    << ',' << fmt(tk.R) << '\n';
            }
            break;
        case TraceKind::PathHeatmap:
            out << "x,y,speed\n";
            for (const auto& tk : log.ticks) {
                out << fmt(tk.position.x) << ',' << fmt(tk.position.y) << ','
                    << fmt(tk.speed) << '\n';
            }
            break;
    }
}

}  // namespace eans
