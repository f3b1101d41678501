#include "eans/energy.hpp"

#include <stdexcept>

namespace eans {

void PowerModel::validate() const {
    if (flight_c0 <= 0.0)
        throw std::invalid_argument("power: hover coefficient c0 must be > 0");
    if (flight_c1 < 0.0 || flight_c2 < 0.0 || compute_idle < 0.0 ||
        compute_active < 0.0)
        throw std::invalid_argument("power: coefficients must be >= 0");
}

void accrue(EnergyLedger& ledger, const PowerModel& power, double speed,
            bool compute_busy, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("accrue: dt must be > 0");
    ledger.flight_J += power.flight_power(speed) * dt;
    ledger.compute_J += (power.compute_idle + (compute_busy ? power.compute_active : 0.0)) * dt;
}

std::map<std::string, double> normalize(const std::map<std::string, EnergyLedger>& ledgers,
                                        const std::string& baseline_key) {
    auto it = ledgers.find(baseline_key);
    if (it == ledgers.end())
        throw std::invalid_argument("normalize: baseline ledger missing");
    double base = it->second.total();
    if (base <= 0.0)
        throw std::invalid_argument("normalize: baseline total must be > 0");
    std::map<std::string, double> out;
    for (const auto& [key, ledger] : ledgers) {
        out[key] = ledger.total() / base * 100.0;
    }
    return out;
}

}  // namespace eans
