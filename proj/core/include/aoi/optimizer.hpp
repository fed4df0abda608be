#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "aoi/censored_moments.hpp"
#include "aoi/system_config.hpp"

namespace aoi {

// Early-sampling policy parameters: state-1 sampling period K and state-2
// threshold beta. The induced state-2 wait is max(0, beta - (X + Y)).
struct EarlyPolicy {
    double k;
    double beta;
};

struct OptimizerConfig {
    double eps = 0.0;          // bisection tolerance; 0 = auto (1e-9 * bracket)
    double lambda_step = 0.0;  // descent K step; 0 = auto ((k0 - inf Y)/400)
    double k0 = 0.0;           // K upper limit; 0 = auto (2 * q_{1-1e-4}(Y+X))
    double u0 = 0.0;           // bisection upper bracket; 0 = auto
    int k_grid_points = 400;
    double window_epsilon = 1e-6;  // relative offset into the open window
};

struct PolicyReport {
    double aoi;
    double rate_lhs;
    double rate_rhs;
    bool feasible;
};

struct KPoint {
    double k;
    double beta;
    double aoi;
};

struct SearchResult {
    double k_star;
    double beta_star;
    double aoi_star;
};

enum class SearchMode { Descent, Grid };

struct WaitAckOptimum {
    double beta_star;
    double aoi;
};

struct Theorem3Window {
    double k_lo;
    double k_hi;
    double k_best;
};

// Q/R/T/p for the given (K, beta) on the early-sampling problem.
CycleMoments cycle_moments(const SystemConfig& cfg, double k, double beta);

// Same quantities with p forced to 0 and unconditioned moments of X+Y
// (the wait-for-ACK limit; T = 1/f_max).
CycleMoments cycle_moments_wait_ack(const SystemConfig& cfg, double beta);

// Closed-form average AoI: Q/(2R) + E[Y]; K/2 + E[Y] in the p = 1 regime.
double eval_aoi(const SystemConfig& cfg, double k, double beta);
double eval_aoi_wait_ack(const SystemConfig& cfg, double beta);

// (lhs, rhs) of the sampling-rate constraint: lhs = R, rhs = (1+P(Y>K))/f_max.
std::pair<double, double> eval_rate(const SystemConfig& cfg, double k,
                                    double beta);
std::pair<double, double> eval_rate_wait_ack(const SystemConfig& cfg,
                                             double beta);

// Threshold fixed point R = max(T, Q/(2 beta)) by bisection.
double solve_beta(const SystemConfig& cfg, double k, const OptimizerConfig& opt);
double solve_beta_wait_ack(const SystemConfig& cfg, const OptimizerConfig& opt);

SearchResult search_k(const SystemConfig& cfg, const OptimizerConfig& opt,
                      SearchMode mode);

WaitAckOptimum wait_for_ack_optimum(const SystemConfig& cfg,
                                    const OptimizerConfig& opt);

// K/2 + E[Y]; valid only for sup Y < K < inf Y + inf X.
double periodic_aoi(const SystemConfig& cfg, double k);

// The open interval (max(sup Y, 1/f_max), inf Y + inf X) when nonempty.
std::optional<Theorem3Window> theorem3_window(const SystemConfig& cfg,
                                              double window_epsilon = 1e-6);

std::vector<KPoint> k_landscape(const SystemConfig& cfg,
                                const OptimizerConfig& opt,
                                const std::vector<double>& k_values);

// Quantile of the sum X + Y.
double sum_quantile(const SystemConfig& cfg, double q);

// P(X + Y > t).
double sum_survival(const SystemConfig& cfg, double t);

}  // namespace aoi
