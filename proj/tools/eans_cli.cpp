// Command line front end: batch mission runs, density sweeps, trace export,
// scenario generation, and config inspection.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "eans/config.hpp"
#include "eans/harness.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<eans::StrategyMode> parse_modes(const std::vector<std::string>& names) {
    std::vector<eans::StrategyMode> modes;
    for (const auto& n : names) modes.push_back(eans::mode_from_name(n));
    return modes;
}

std::string log_filename(const eans::MetricsRow& row) {
    return row.scenario_id + "_" + row.mode + "_" + std::to_string(row.seed) +
           ".ndjson";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EANS navigation strategy simulator"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Mission config JSON (partial overrides allowed)")
        ->check(CLI::ExistingFile);

    // run
    auto* run = app.add_subcommand("run", "Run missions over scenarios x modes x seeds");
    std::vector<std::string> run_scenarios;
    std::vector<std::string> run_modes{"baseline", "lookup", "eans"};
    std::vector<std::uint64_t> run_seeds;
    int run_replicates = 1;
    std::string run_out = "out";
    int run_jobs = 1;
    run->add_option("--scenario", run_scenarios, "Scenario JSON file(s)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--modes", run_modes, "Strategy modes (baseline, lookup, eans)");
    run->add_option("--seeds", run_seeds, "Explicit seed list");
    run->add_option("--replicates", run_replicates, "Seeds 1..N when --seeds absent");
    run->add_option("--out", run_out, "Output directory");
    run->add_option("--jobs", run_jobs, "Parallel missions");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Density sweep over generated scenarios");
    std::vector<double> sweep_densities;
    std::vector<std::string> sweep_modes{"baseline", "lookup", "eans"};
    int sweep_replicates = 3;
    std::string sweep_out = "sweep.csv";
    int sweep_jobs = 1;
    std::uint64_t sweep_seed = 1;
    std::vector<double> sweep_bounds{40.0, 20.0};
    sweep->add_option("--densities", sweep_densities, "Obstacle densities in [0, 0.4]")
        ->required();
    sweep->add_option("--modes", sweep_modes, "Strategy modes");
    sweep->add_option("--replicates", sweep_replicates, "Scenarios per density");
    sweep->add_option("--out", sweep_out, "Output CSV path");
    sweep->add_option("--jobs", sweep_jobs, "Parallel missions");
    sweep->add_option("--seed", sweep_seed, "Base generation seed");
    sweep->add_option("--bounds", sweep_bounds, "Field size W H")->expected(2);

    // trace
    auto* trace = app.add_subcommand("trace", "Export plot columns from a mission log");
    std::string trace_log, trace_kind = "velocity-curve", trace_out;
    trace->add_option("--log", trace_log, "Mission log (.ndjson)")
        ->required()
        ->check(CLI::ExistingFile);
    trace->add_option("--kind", trace_kind,
                      "velocity-curve | busy-curve | path-heatmap");
    trace->add_option("--out", trace_out, "Output file (default stdout)");

    // config dump
    auto* config = app.add_subcommand("config", "Config utilities");
    config->require_subcommand(1);
    auto* config_dump = config->add_subcommand("dump", "Print the effective config JSON");

    // scenario gen
    auto* scenario = app.add_subcommand("scenario", "Scenario utilities");
    scenario->require_subcommand(1);
    auto* gen = scenario->add_subcommand("gen", "Generate a scenario from zone densities");
    std::vector<double> gen_zones{0.1};
    std::uint64_t gen_seed = 1;
    std::string gen_out = "scenario.json";
    std::vector<double> gen_bounds{40.0, 20.0};
    double gen_range = 8.0;
    gen->add_option("--zones", gen_zones, "Per-zone densities, zones split x evenly");
    gen->add_option("--seed", gen_seed, "Generation seed");
    gen->add_option("--out", gen_out, "Output scenario path");
    gen->add_option("--bounds", gen_bounds, "Field size W H")->expected(2);
    gen->add_option("--sensor-range", gen_range, "Sensor max range (m)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        eans::MissionConfig mission_config;
        if (!config_path.empty()) mission_config = eans::load_config(config_path);

        if (*run) {
            eans::BatchSpec spec;
            spec.config = mission_config;
            spec.jobs = run_jobs;
            spec.modes = parse_modes(run_modes);
            if (run_seeds.empty()) {
                for (int i = 1; i <= run_replicates; ++i) run_seeds.push_back(i);
            }
            spec.seeds = run_seeds;
            for (const auto& path : run_scenarios) {
                spec.scenarios.emplace_back(fs::path(path).stem().string(),
                                            eans::load_scenario(path));
            }
            eans::BatchResult result = eans::run_batch(spec);
            fs::create_directories(fs::path(run_out) / "logs");
            write_file(fs::path(run_out) / "metrics.csv", eans::metrics_csv(result.rows));
            write_file(fs::path(run_out) / "aggregate.csv",
                       eans::aggregate_csv(result.aggregates));
            for (std::size_t i = 0; i < result.rows.size(); ++i) {
                std::ofstream lf(fs::path(run_out) / "logs" / log_filename(result.rows[i]),
                                 std::ios::binary);
                eans::write_log(result.logs[i], lf);
            }
            double wall_ms = 0.0;
            for (const auto& log : result.logs) wall_ms += log.mapping_wall_s * 1e3;
            std::cerr << "missions: " << result.rows.size()
                      << ", mapping wall-clock total: " << wall_ms << " ms\n";
            std::cout << eans::aggregate_csv(result.aggregates);
            if (result.any_collision) {
                std::cerr << "safety failure: at least one mission ended in collision\n";
                return 2;
            }
            return 0;
        }
        if (*sweep) {
            eans::SweepSpec spec;
            spec.config = mission_config;
            spec.densities = sweep_densities;
            spec.modes = parse_modes(sweep_modes);
            spec.replicates = sweep_replicates;
            spec.jobs = sweep_jobs;
            spec.base.seed = sweep_seed;
            spec.base.bounds = {{0, 0}, {sweep_bounds[0], sweep_bounds[1]}};
            spec.base.sensor.max_range = 8.0;
            spec.base.sensor.fov = 6.283185307179586;
            spec.base.sensor.ray_count = 128;
            spec.base.sensor.pixel_capacity = 128;
            eans::SweepResult result = eans::density_sweep(spec);
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
            write_file(sweep_out, eans::sweep_csv(result));
            bool collision = false;
            for (const auto& row : result.rows) {
                if (row.terminal == "collision") collision = true;
            }
            return collision ? 2 : 0;
        }
        if (*trace) {
            std::ifstream in(trace_log);
            eans::MissionLog log = eans::read_log(in);
            eans::TraceKind kind = eans::trace_kind_from_name(trace_kind);
            if (trace_out.empty()) {
                eans::export_trace(log, kind, std::cout);
            } else {
                std::ofstream out(trace_out, std::ios::binary);
                eans::export_trace(log, kind, out);
            }
            return 0;
        }
        if (*config_dump) {
            eans::MissionConfig dumped = mission_config;
            if (dumped.lookup.empty()) {
                dumped.lookup = eans::default_lookup_table(eans::SensorConfig{}.pixel_capacity);
            }
            std::cout << eans::config_to_json(dumped);
            return 0;
        }
        if (*gen) {
            eans::GenParams params;
            params.bounds = {{0, 0}, {gen_bounds[0], gen_bounds[1]}};
            params.zone_densities = gen_zones;
            params.seed = gen_seed;
            params.sensor.max_range = gen_range;
            params.sensor.fov = 6.283185307179586;
            params.sensor.ray_count = 128;
            params.sensor.pixel_capacity = 128;
            eans::Scenario s = eans::generate_scenario(params);
            eans::save_scenario(s, gen_out);
            std::cerr << "wrote " << gen_out << " (" << s.obstacles.size()
                      << " obstacles)\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
