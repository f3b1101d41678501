#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "eans/grid.hpp"
#include "eans/planner.hpp"

namespace eans {

struct AdapterConfig {
    double alpha = 3.0;    // sigmoid rate of the risk weight
    double lambda = 0.5;   // blend between range-derived and measured distance
    double gamma = 1.0;    // density scale for the optimal trajectory length
    double epsilon = 2.0;  // sensitivity of the trajectory probability
    double phi = 0.6;      // acceptance threshold for resolution coarsening
    int sigma = 3;         // captures required to confirm a cell
    double a_max = 2.0;    // m/s^2
    double v_lo = 0.5;     // m/s
    double v_hi = 3.5;     // m/s
    std::vector<double> frequency_list{5, 10, 15, 20, 25, 30};  // Hz
    ResolutionLadder ladder{{0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}};

    void validate() const;
};

struct NavStrategy {
    double v_max = 0.0;  // m/s
    double H = 0.0;      // Hz
    double R = 0.0;      // m
    bool replan = false;
};

struct RiskAssessment {
    Vec2 gradient;          // P_t - P_o, unnormalized
    double beta = 0.0;      // cosine of the velocity/gradient angle
    double eta = 0.0;       // risk weight in [0, 1]
    double distance = 0.0;  // effective perceived distance d, <= d_c
    bool zero_velocity_flagged = false;
};

// (beta, eta). Callers handle the no-obstacle case (eta = 0) themselves;
// a zero-length velocity with an obstacle present maps to beta = 0.
std::pair<double, double> risk_weight(Vec2 velocity, Vec2 gradient, double alpha);

double effective_distance(double eta, double obstacle_dist, double d_c, double lambda);

// Closed-form inversion of v*t_r + v^2/(2*a_max) = d.
double max_velocity_preclamp(double d, double t_r, double a_max);

struct VelocityBound {
    double v = 0.0;
    bool replan = false;  // raised when d collapses to zero
};
VelocityBound max_velocity(double d, double t_r, double a_max, double v_lo,
                           double v_hi);

// Smallest list entry within [H_min, H_max]; nullopt when the denominator is
// non-positive or no list entry fits.
std::optional<double> frequency_select(double v_t, double d, int sigma,
                                       double a_max, double tm_hat, double t_p,
                                       double t_o,
                                       const std::vector<double>& frequency_list);

double optimal_length(double span, int rho, int rho_max, double gamma);

// P = exp(-(epsilon/span) * (length - optimal)) for length >= optimal, else 1.
double trajectory_probability(double length, double optimal, double span,
                              double epsilon);

struct ResolutionChoice {
    double r_c = 0.0;
    bool replan = false;
};
// Greedy coarsening: accept each coarser ladder level while the endpoint
// cells stay disjoint, stopping at the first overlap. A probability below
// phi forces the finest level and a replan. Without obstacle endpoints the
// coarsest level is used.
ResolutionChoice adapt_resolution(double probability,
                                  const std::optional<std::pair<Vec2, Vec2>>& endpoints,
                                  const GridFrame& frame,
                                  const ResolutionLadder& ladder, double phi);

struct StepInputs {
    Vec2 velocity;                          // current UAV velocity
    std::optional<ClosestApproach> approach;
    double remaining_length = 0.0;          // L, from UAV to goal along trajectory
    double remaining_span = 0.0;            // L-bar, straight-line to goal
    int rho = 0;
    int rho_max = 1;
    double d_c = 5.0;
    double t_r = 0.0;                       // reaction time from the previous cycle
    double t_p = 0.0;
    double t_o = 0.0;
    double R_current = 0.0;
    std::function<double(double)> mapping_latency;  // t^_m as a function of R
    GridFrame frame;
};

struct StepTrace {
    RiskAssessment risk;
    double v_preclamp = 0.0;
    double probability = 1.0;
    double optimal = 0.0;
    double tm_used = 0.0;
    double ts_used = 0.0;
    bool backoff_engaged = false;
    bool frequency_forced = false;  // back-off hit v_lo and still infeasible
};

NavStrategy eans_step(const StepInputs& in, const AdapterConfig& cfg,
                      StepTrace* trace = nullptr);

struct LookupRow {
    double cutoff = 0.0;  // upper rho_c bound this row covers (inclusive)
    double v = 0.0;
    double H = 0.0;
    double R = 0.0;
};

// Default rows scaled to rho_max; cutoffs are config placeholders.
std::vector<LookupRow> default_lookup_table(int rho_max);
NavStrategy lookup_table_strategy(int rho, const std::vector<LookupRow>& rows);

NavStrategy baseline_strategy();

}  // namespace eans
