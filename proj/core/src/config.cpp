#include "eans/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace eans {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) { known = true; break; }
        }
        if (!known) {
            throw std::invalid_argument(std::string("config: unknown field '") +
                                        it.key() + "' in " + where);
        }
    }
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string config_to_json(const MissionConfig& c) {
    json j;
    j["adapter"] = {{"alpha", c.adapter.alpha},
                    {"lambda", c.adapter.lambda},
                    {"gamma", c.adapter.gamma},
                    {"epsilon", c.adapter.epsilon},
                    {"phi", c.adapter.phi},
                    {"sigma", c.adapter.sigma},
                    {"a_max", c.adapter.a_max},
                    {"velocity_range", {c.adapter.v_lo, c.adapter.v_hi}},
                    {"frequency_list", c.adapter.frequency_list},
                    {"resolution_ladder", c.adapter.ladder.levels}};
    j["timing"] = {{"mapping_unit_cost", c.timing.mapping_unit_cost},
                   {"planning_latency", c.timing.t_p},
                   {"command_latency", c.timing.t_o}};
    j["power"] = {{"flight_c0", c.power.flight_c0},
                  {"flight_c1", c.power.flight_c1},
                  {"flight_c2", c.power.flight_c2},
                  {"compute_idle", c.power.compute_idle},
                  {"compute_active", c.power.compute_active}};
    j["mission"] = {{"dt", c.dt},
                    {"uav_radius", c.uav_radius},
                    {"safety_margin", c.safety_margin},
                    {"timeout_factor", c.timeout_factor}};
    j["lookup_table"] = json::array();
    for (const auto& row : c.lookup) {
        j["lookup_table"].push_back(
            {{"cutoff", row.cutoff}, {"v", row.v}, {"H", row.H}, {"R", row.R}});
    }
    j["fixed"] = {{"v_max", c.fixed.v_max}, {"H", c.fixed.H}, {"R", c.fixed.R}};
    return j.dump(2) + "\n";
}

MissionConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    reject_unknown(j, {"adapter", "timing", "power", "mission", "lookup_table", "fixed"},
                   "config");
    MissionConfig c;
    if (j.contains("adapter")) {
        const json& a = j.at("adapter");
        reject_unknown(a,
                       {"alpha", "lambda", "gamma", "epsilon", "phi", "sigma",
                        "a_max", "velocity_range", "frequency_list",
                        "resolution_ladder"},
                       "adapter");
        get_if_present(a, "alpha", c.adapter.alpha);
        get_if_present(a, "lambda", c.adapter.lambda);
        get_if_present(a, "gamma", c.adapter.gamma);
        get_if_present(a, "epsilon", c.adapter.epsilon);
        get_if_present(a, "phi", c.adapter.phi);
        get_if_present(a, "sigma", c.adapter.sigma);
        get_if_present(a, "a_max", c.adapter.a_max);
        if (a.contains("velocity_range")) {
            auto vr = a.at("velocity_range").get<std::vector<double>>();
            if (vr.size() != 2)
                throw std::invalid_argument("config: velocity_range must be [lo, hi]");
            c.adapter.v_lo = vr[0];
            c.adapter.v_hi = vr[1];
        }
        get_if_present(a, "frequency_list", c.adapter.frequency_list);
        if (a.contains("resolution_ladder")) {
            c.adapter.ladder.levels =
                a.at("resolution_ladder").get<std::vector<double>>();
        }
    }
    if (j.contains("timing")) {
        const json& t = j.at("timing");
        reject_unknown(t, {"mapping_unit_cost", "planning_latency", "command_latency"},
                       "timing");
        get_if_present(t, "mapping_unit_cost", c.timing.mapping_unit_cost);
        get_if_present(t, "planning_latency", c.timing.t_p);
        get_if_present(t, "command_latency", c.timing.t_o);
    }
    if (j.contains("power")) {
        const json& p = j.at("power");
        reject_unknown(p,
                       {"flight_c0", "flight_c1", "flight_c2", "compute_idle",
                        "compute_active"},
                       "power");
        get_if_present(p, "flight_c0", c.power.flight_c0);
        get_if_present(p, "flight_c1", c.power.flight_c1);
        get_if_present(p, "flight_c2", c.power.flight_c2);
        get_if_present(p, "compute_idle", c.power.compute_idle);
        get_if_present(p, "compute_active", c.power.compute_active);
    }
    if (j.contains("mission")) {
        const json& m = j.at("mission");
        reject_unknown(m, {"dt", "uav_radius", "safety_margin", "timeout_factor"},
                       "mission");
        get_if_present(m, "dt", c.dt);
        get_if_present(m, "uav_radius", c.uav_radius);
        get_if_present(m, "safety_margin", c.safety_margin);
        get_if_present(m, "timeout_factor", c.timeout_factor);
    }
    if (j.contains("lookup_table")) {
        c.lookup.clear();
        for (const json& rj : j.at("lookup_table")) {
            reject_unknown(rj, {"cutoff", "v", "H", "R"}, "lookup_table row");
            c.lookup.push_back({rj.at("cutoff").get<double>(), rj.at("v").get<double>(),
                                rj.at("H").get<double>(), rj.at("R").get<double>()});
        }
    }
    if (j.contains("fixed")) {
        const json& f = j.at("fixed");
        reject_unknown(f, {"v_max", "H", "R"}, "fixed");
        get_if_present(f, "v_max", c.fixed.v_max);
        get_if_present(f, "H", c.fixed.H);
        get_if_present(f, "R", c.fixed.R);
    }
    c.validate();
    return c;
}

MissionConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

}  // namespace eans
