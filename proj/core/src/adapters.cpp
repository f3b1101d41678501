#include "eans/adapters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eans {

void AdapterConfig::validate() const {
    if (alpha <= 0.0) throw std::invalid_argument("adapter: alpha must be > 0");
    if (lambda <= 0.0 || lambda >= 1.0)
        throw std::invalid_argument("adapter: lambda must be in (0,1)");
    if (gamma <= 0.0) throw std::invalid_argument("adapter: gamma must be > 0");
    if (epsilon <= 0.0) throw std::invalid_argument("adapter: epsilon must be > 0");
    if (phi <= 0.0 || phi > 1.0)
        throw std::invalid_argument("adapter: phi must be in (0,1]");
    if (sigma < 1) throw std::invalid_argument("adapter: sigma must be >= 1");
    if (a_max <= 0.0) throw std::invalid_argument("adapter: a_max must be > 0");
    if (v_lo <= 0.0 || v_hi <= v_lo)
        throw std::invalid_argument("adapter: need 0 < v_lo < v_hi");
    if (frequency_list.empty())
        throw std::invalid_argument("adapter: frequency list must not be empty");
    for (std::size_t i = 0; i < frequency_list.size(); ++i) {
        if (frequency_list[i] <= 0.0 ||
            (i > 0 && frequency_list[i] <= frequency_list[i - 1]))
            throw std::invalid_argument("adapter: frequency list must be strictly increasing");
    }
    if (ladder.levels.empty())
        throw std::invalid_argument("adapter: resolution ladder must not be empty");
}

std::pair<double, double> risk_weight(Vec2 velocity, Vec2 gradient, double alpha) {
    double nv = velocity.norm(), ng = gradient.norm();
    if (nv <= 0.0 || ng <= 0.0) {
        // Degenerate direction: treat the cosine as zero.
        return {0.0, 0.5};
    }
    double beta = velocity.dot(gradient) / (nv * ng);
    beta = std::clamp(beta, -1.0, 1.0);
    return {beta, 1.0 / (1.0 + std::exp(alpha * beta))};
}

double effective_distance(double eta, double obstacle_dist, double d_c,
                          double lambda) {
    double d = lambda * (1.0 - eta) * d_c + (1.0 - lambda) * obstacle_dist;
    return std::clamp(d, 0.0, d_c);
}

double max_velocity_preclamp(double d, double t_r, double a_max) {
    double s = t_r * a_max;
    return std::sqrt(s * s + 2.0 * d * a_max) - s;
}

VelocityBound max_velocity(double d, double t_r, double a_max, double v_lo,
                           double v_hi) {
    double v = max_velocity_preclamp(d, t_r, a_max);
    VelocityBound out;
    out.v = std::clamp(v, v_lo, v_hi);
    out.replan = d <= 1e-12;
    return out;
}

std::optional<double> frequency_select(double v_t, double d, int sigma,
                                       double a_max, double tm_hat, double t_p,
                                       double t_o,
                                       const std::vector<double>& frequency_list) {
    double ts_hat = tm_hat + t_p + t_o;
    double h_min = 0.0;
    if (sigma > 1) {
        double denom = 2.0 * d * a_max - v_t * v_t - 2.0 * a_max * v_t * ts_hat;
        if (denom <= 0.0) return std::nullopt;
        h_min = 2.0 * (sigma - 1) * a_max * v_t / denom;
    }
    double h_max = tm_hat > 0.0 ? 1.0 / tm_hat : std::numeric_limits<double>::infinity();
    for (double h : frequency_list) {
        if (h >= h_min - 1e-12 && h <= h_max + 1e-12) return h;
    }
    return std::nullopt;
}

double optimal_length(double span, int rho, int rho_max, double gamma) {
    if (rho_max <= 0)
        throw std::invalid_argument("optimal_length: rho_max must be > 0");
    if (span <= 0.0)
        throw std::invalid_argument("optimal_length: span must be > 0");
    return (1.0 + gamma * double(rho) / rho_max) * span;
}

double trajectory_probability(double length, double optimal, double span,
                              double epsilon) {
    if (length < optimal) return 1.0;
    return std::exp(-(epsilon / span) * (length - optimal));
}

ResolutionChoice adapt_resolution(double probability,
                                  const std::optional<std::pair<Vec2, Vec2>>& endpoints,
                                  const GridFrame& frame,
                                  const ResolutionLadder& ladder, double phi) {
    if (!endpoints) {
        return {ladder.coarsest(), false};
    }
    if (probability < phi) {
        return {ladder.finest(), true};
    }
    double r_c = ladder.levels[0];
    for (std::size_t i = 1; i < ladder.levels.size(); ++i) {
        if (frame.manhattan_distance(endpoints->first, endpoints->second,
                                     ladder.levels[i]) > 0) {
            r_c = ladder.levels[i];
        } else {
            break;
        }
    }
    return {r_c, false};
}

namespace {

struct FreqPick {
    double v = 0.0;
    double H = 0.0;
    bool backoff = false;
    bool forced = false;
};

FreqPick pick_frequency(double v_start, double d, double tm_hat,
                        const AdapterConfig& cfg, double t_p, double t_o) {
    FreqPick out;
    double v = v_start;
    while (true) {
        if (auto h = frequency_select(v, d, cfg.sigma, cfg.a_max, tm_hat, t_p,
                                      t_o, cfg.frequency_list)) {
            out.v = v;
            out.H = *h;
            return out;
        }
        if (v <= cfg.v_lo + 1e-12) break;
        out.backoff = true;
        v = std::max(cfg.v_lo, v - 0.25);
    }
    // Even v_lo is infeasible: force the largest admissible list entry.
    out.v = cfg.v_lo;
    out.forced = true;
    double h_max = tm_hat > 0.0 ? 1.0 / tm_hat : std::numeric_limits<double>::infinity();
    out.H = cfg.frequency_list.front();
    for (double h : cfg.frequency_list) {
        if (h <= h_max + 1e-12) out.H = h;
    }
    return out;
}

}  // namespace

NavStrategy eans_step(const StepInputs& in, const AdapterConfig& cfg,
                      StepTrace* trace) {
    StepTrace local;
    StepTrace& tr = trace ? *trace : local;

    // Velocity adapter: risk weight, effective distance, kinodynamic bound.
    double obstacle_dist = in.d_c;
    if (in.approach) {
        tr.risk.gradient = in.approach->trajectory_point - in.approach->obstacle;
        obstacle_dist = std::min(in.approach->dist, in.d_c);
        if (in.velocity.norm() <= 0.0) {
            tr.risk.beta = 0.0;
            tr.risk.eta = 0.5;
            tr.risk.zero_velocity_flagged = true;
        } else {
            std::tie(tr.risk.beta, tr.risk.eta) =
                risk_weight(in.velocity, tr.risk.gradient, cfg.alpha);
        }
    } else {
        tr.risk.gradient = {};
        tr.risk.beta = 0.0;
        tr.risk.eta = 0.0;  // no obstacle in range
    }
    double d = effective_distance(tr.risk.eta, obstacle_dist, in.d_c, cfg.lambda);
    tr.risk.distance = d;
    tr.v_preclamp = max_velocity_preclamp(d, in.t_r, cfg.a_max);
    VelocityBound vb = max_velocity(d, in.t_r, cfg.a_max, cfg.v_lo, cfg.v_hi);

    // Frequency adapter with velocity back-off on infeasibility.
    double tm_cur = in.mapping_latency(in.R_current);
    FreqPick pick = pick_frequency(vb.v, d, tm_cur, cfg, in.t_p, in.t_o);

    // Resolution adapter.
    tr.optimal = optimal_length(in.remaining_span, in.rho, in.rho_max, cfg.gamma);
    tr.probability = trajectory_probability(in.remaining_length, tr.optimal,
                                            in.remaining_span, cfg.epsilon);
    std::optional<std::pair<Vec2, Vec2>> endpoints;
    if (in.approach) {
        endpoints = std::make_pair(in.approach->trajectory_point, in.approach->obstacle);
    }
    ResolutionChoice rc =
        adapt_resolution(tr.probability, endpoints, in.frame, cfg.ladder, cfg.phi);

    // The new resolution changes t^_m; re-run the frequency pick against it so
    // the emitted (v, H, R) triple is self-consistent.
    double tm_new = in.mapping_latency(rc.r_c);
    if (std::abs(tm_new - tm_cur) > 1e-15) {
        pick = pick_frequency(vb.v, d, tm_new, cfg, in.t_p, in.t_o);
    }
    tr.tm_used = tm_new;
    tr.ts_used = tm_new + in.t_p + in.t_o;
    tr.backoff_engaged = pick.backoff;
    tr.frequency_forced = pick.forced;

    NavStrategy out;
    out.v_max = pick.v;
    out.H = pick.H;
    out.R = rc.r_c;
    out.replan = rc.replan || vb.replan;
    return out;
}

std::vector<LookupRow> default_lookup_table(int rho_max) {
    // Threshold placeholders keyed to the obstacle-pixel fraction.
    return {
        {0.02 * rho_max, 2.5, 5, 0.5},  {0.10 * rho_max, 2.0, 10, 0.4},
        {0.25 * rho_max, 1.5, 15, 0.3}, {0.50 * rho_max, 1.0, 20, 0.2},
        {0.75 * rho_max, 0.75, 25, 0.15}, {1.00 * rho_max, 0.5, 30, 0.1},
    };
}

NavStrategy lookup_table_strategy(int rho, const std::vector<LookupRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("lookup table: no rows");
    for (const auto& row : rows) {
        if (row.cutoff >= rho) return {row.v, row.H, row.R, false};
    }
    throw std::invalid_argument("lookup table: rho_c not covered by any row");
}

NavStrategy baseline_strategy() { return {0.5, 30.0, 0.1, false}; }

}  // namespace eans
