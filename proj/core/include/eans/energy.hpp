#pragma once

#include <map>
#include <string>

namespace eans {

struct PowerModel {
    // Flight power g(v) = c0 + c1*v + c2*v^3 (watts). Coefficients are
    // config defaults, not measured values.
    double flight_c0 = 100.0;
    double flight_c1 = 5.0;
    double flight_c2 = 1.0;
    double compute_idle = 5.0;    // watts
    double compute_active = 15.0; // additional watts while compute-busy

    double flight_power(double speed) const {
        return flight_c0 + flight_c1 * speed + flight_c2 * speed * speed * speed;
    }
    void validate() const;
};

struct EnergyLedger {
    double flight_J = 0.0;
    double compute_J = 0.0;

    double total() const { return flight_J + compute_J; }
};

void accrue(EnergyLedger& ledger, const PowerModel& power, double speed,
            bool compute_busy, double dt);

// Total energy per mode as a percentage of the baseline total.
std::map<std::string, double> normalize(const std::map<std::string, EnergyLedger>& ledgers,
                                        const std::string& baseline_key = "baseline");

}  // namespace eans
