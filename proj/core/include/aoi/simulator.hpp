#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "aoi/system_config.hpp"

namespace aoi {

struct EarlySampling {
    double k;
    double beta;
};

struct WaitForAck {
    double beta;
};

struct PeriodicPreempt {
    double period;
};

using PolicySpec = std::variant<EarlySampling, WaitForAck, PeriodicPreempt>;

struct SimConfig {
    std::uint64_t cycles = 100000;
    // Cycles discarded before statistics start; kAutoWarmup = 2% of cycles,
    // at least 100.
    static constexpr std::uint64_t kAutoWarmup = ~0ull;
    std::uint64_t warmup_cycles = kAutoWarmup;
    std::uint64_t seed = 1;
    std::uint64_t max_events = 2'000'000'000ull;
};

struct SimStats {
    double avg_aoi = 0.0;
    double aoi_ci95 = 0.0;
    double mean_intersample = 0.0;
    std::uint64_t cycles_completed = 0;
    std::uint64_t samples_taken = 0;
    std::uint64_t corrupted_samples = 0;
    std::uint64_t preemptions = 0;
    double empirical_p = 0.0;
    double sim_time = 0.0;
};

enum class TraceKind { Sample, Corrupt, Deliver, Ack, Preempt, State1, State2 };

// One event per line in the dump: `time,event_kind,detail`. The detail column
// carries the generation time for SAMPLE/CORRUPT/DELIVER/PREEMPT and the
// delivery time for ACK; 0 for state transitions.
struct TraceRecord {
    double time;
    TraceKind kind;
    double detail;
};

const char* trace_kind_name(TraceKind kind);

SimStats simulate(const SystemConfig& cfg, const PolicySpec& policy,
                  const SimConfig& sim, std::vector<TraceRecord>* trace = nullptr);

struct ValidationReport {
    double sim_aoi;
    double formula_aoi;
    double z_score;  // AoI z-score
    double empirical_p;
    double formula_p;
    double rate_sim;
    double rate_formula;
    double cycle_len_sim;
    double cycle_len_formula;
    double z_cycle_len;
    double samples_per_cycle_sim;
    double samples_per_cycle_formula;
    double z_samples_per_cycle;
};

// Runs the early-sampling policy (K, beta) and compares the empirical cycle
// averages against the closed-form values.
ValidationReport validate_against_closed_form(const SystemConfig& cfg, double k,
                                              double beta, const SimConfig& sim);

}  // namespace aoi
