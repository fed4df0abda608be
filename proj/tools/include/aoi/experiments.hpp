#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/optimizer.hpp"
#include "aoi/simulator.hpp"
#include "aoi/system_config.hpp"

namespace aoi {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A reproducible experiment definition, loaded from a JSON config file.
// `schema_version` is mandatory (currently 1).
struct ExperimentConfig {
    SystemConfig system;
    std::vector<double> inv_fmax_values;
    std::vector<std::string> policies;  // subset of {early, wait_ack, periodic}
    OptimizerConfig optimizer;
    SimConfig simulator;
    std::string csv_path;
    std::string trace_path;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

struct SolveRow {
    double inv_fmax;
    std::string policy;
    std::optional<double> k;
    std::optional<double> beta;
    std::optional<double> aoi;
    std::optional<double> rate_lhs;
    std::optional<double> rate_rhs;
    bool feasible;
    std::string note;
};

std::vector<SolveRow> run_solve(const ExperimentConfig& cfg);
void write_solve_csv(std::ostream& os, const std::vector<SolveRow>& rows);

struct SweepRow {
    double inv_fmax;
    std::string policy;
    std::optional<double> k;  // K* for early, period for periodic
    std::optional<double> beta;
    std::optional<double> aoi_closed;
    double aoi_sim;
    double aoi_ci95;
    std::optional<double> rate_lhs;
    std::optional<double> rate_rhs;
    bool feasible;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Baseline period rule: the smallest admissible period in the Theorem 3
// window when one exists, otherwise the period whose effective sampling rate
// (preemption samples included) meets the rate constraint exactly; nullopt
// when unconstrained with no window.
std::optional<double> periodic_baseline_period(const SystemConfig& sys,
                                               double window_epsilon);

std::vector<KPoint> run_landscape(const ExperimentConfig& cfg, double k_min,
                                  double k_max, int points);
void write_landscape_csv(std::ostream& os, const std::vector<KPoint>& points);

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace);
void print_sim_stats(std::ostream& os, const SimStats& st);

// argv-level entry point used by the `aoi` binary; returns the process exit
// code (0 ok, 2 config error, 3 numerical failure).
int run_cli(int argc, const char* const* argv);

}  // namespace aoi
