#include "aoi/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "aoi/censored_moments.hpp"
#include "aoi/errors.hpp"
#include "aoi/random.hpp"

namespace aoi {

namespace {

using nlohmann::json;

constexpr double kFeasSlack = 1e-9;

const std::vector<std::string> kPolicyOrder = {"early", "wait_ack", "periodic"};

DelayModel parse_delay(const json& j, const std::string& field) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "constant")
            return DelayModel::constant(j.at("value").get<double>());
        if (kind == "uniform")
            return DelayModel::uniform(j.at("lo").get<double>(),
                                       j.at("hi").get<double>());
        if (kind == "shifted_exponential")
            return DelayModel::shifted_exponential(j.at("shift").get<double>(),
                                                   j.at("rate").get<double>());
        throw ConfigError(field + ".kind: unknown distribution '" + kind + "'");
    } catch (const json::exception& e) {
        throw ConfigError(field + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_num(*v) : std::string();
}

// Bounded worker pool; results land in caller-indexed slots, so output order
// is independent of completion order.
template <class Fn>
void parallel_for(std::size_t n, const Fn& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n;
                 i = next.fetch_add(1))
                fn(i);
        });
    for (auto& t : pool) t.join();
}

int policy_rank(const std::string& name) {
    const auto it = std::find(kPolicyOrder.begin(), kPolicyOrder.end(), name);
    return static_cast<int>(it - kPolicyOrder.begin());
}

SimConfig row_sim_config(const ExperimentConfig& cfg, std::size_t ivf_index,
                         int rank) {
    SimConfig sim = cfg.simulator;
    sim.seed = derive_seed(cfg.simulator.seed,
                           static_cast<std::uint64_t>(ivf_index) * 4 +
                               static_cast<std::uint64_t>(rank));
    return sim;
}

struct PeriodicChoice {
    double period;
    double rate_lhs;  // mean time per sample implied by the period rule
    bool in_window;   // closed form K/2 + E[Y] applies
};

// Period for the periodic+preempt baseline: the smallest admissible period in
// the Theorem 3 window when one exists; otherwise the period solving
// period = inv_fmax * (1 + P(Y > period)), which makes the sampling rate
// (preemption samples included) meet the constraint exactly.
std::optional<PeriodicChoice> periodic_period(const SystemConfig& sys,
                                              double window_epsilon) {
    if (const auto w = theorem3_window(sys, window_epsilon))
        return PeriodicChoice{w->k_best, w->k_best, true};
    if (!(sys.inv_fmax > 0.0)) return std::nullopt;
    const double ivf = sys.inv_fmax;
    double lo = ivf, hi = 2.0 * ivf;
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid - ivf * (1.0 + late_ack_prob(sys, mid)) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return PeriodicChoice{0.5 * (lo + hi), ivf, false};
}

}  // namespace

std::optional<double> periodic_baseline_period(const SystemConfig& sys,
                                               double window_epsilon) {
    const auto pc = periodic_period(sys, window_epsilon);
    if (!pc) return std::nullopt;
    return pc->period;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("schema_version"))
            throw ConfigError("missing mandatory field 'schema_version'");
        if (j.at("schema_version").get<int>() != 1)
            throw ConfigError("unsupported schema_version (expected 1)");
        if (!j.contains("system"))
            throw ConfigError("missing mandatory field 'system'");
        const json& sys = j.at("system");
        DelayModel y = parse_delay(sys.at("y"), "system.y");
        DelayModel x = parse_delay(sys.at("x"), "system.x");
        const double inv_fmax = get_or(sys, "inv_fmax", 0.0);
        SystemConfig system = [&] {
            try {
                return SystemConfig(std::move(y), std::move(x), inv_fmax);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("system: ") + e.what());
            }
        }();

        ExperimentConfig cfg{std::move(system), {}, {}, {}, {}, {}, {}};

        if (j.contains("inv_fmax_values")) {
            cfg.inv_fmax_values =
                j.at("inv_fmax_values").get<std::vector<double>>();
            if (cfg.inv_fmax_values.empty())
                throw ConfigError("inv_fmax_values must be nonempty");
            for (std::size_t i = 1; i < cfg.inv_fmax_values.size(); ++i)
                if (!(cfg.inv_fmax_values[i] > cfg.inv_fmax_values[i - 1]))
                    throw ConfigError(
                        "inv_fmax_values must be strictly increasing");
        } else {
            cfg.inv_fmax_values = {cfg.system.inv_fmax};
        }

        cfg.policies = get_or(j, "policies", kPolicyOrder);
        for (const auto& p : cfg.policies)
            if (std::find(kPolicyOrder.begin(), kPolicyOrder.end(), p) ==
                kPolicyOrder.end())
                throw ConfigError("policies: unknown policy '" + p + "'");
        std::sort(cfg.policies.begin(), cfg.policies.end(),
                  [](const auto& a, const auto& b) {
                      return policy_rank(a) < policy_rank(b);
                  });
        cfg.policies.erase(
            std::unique(cfg.policies.begin(), cfg.policies.end()),
            cfg.policies.end());

        if (j.contains("optimizer")) {
            const json& o = j.at("optimizer");
            cfg.optimizer.eps = get_or(o, "eps", 0.0);
            cfg.optimizer.lambda_step = get_or(o, "lambda_step", 0.0);
            cfg.optimizer.k0 = get_or(o, "k0", 0.0);
            cfg.optimizer.u0 = get_or(o, "u0", 0.0);
            cfg.optimizer.k_grid_points = get_or(o, "k_grid_points", 400);
            cfg.optimizer.window_epsilon = get_or(o, "window_epsilon", 1e-6);
        }
        if (j.contains("simulator")) {
            const json& s = j.at("simulator");
            cfg.simulator.cycles =
                get_or<std::uint64_t>(s, "cycles", cfg.simulator.cycles);
            cfg.simulator.warmup_cycles = get_or<std::uint64_t>(
                s, "warmup_cycles", SimConfig::kAutoWarmup);
            cfg.simulator.seed =
                get_or<std::uint64_t>(s, "seed", cfg.simulator.seed);
            cfg.simulator.max_events =
                get_or<std::uint64_t>(s, "max_events", cfg.simulator.max_events);
        }
        if (j.contains("outputs")) {
            const json& o = j.at("outputs");
            cfg.csv_path = get_or<std::string>(o, "csv_path", "");
            cfg.trace_path = get_or<std::string>(o, "trace_path", "");
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::vector<SolveRow> run_solve(const ExperimentConfig& cfg) {
    std::vector<SolveRow> rows;
    for (double ivf : cfg.inv_fmax_values) {
        const SystemConfig sys(cfg.system.y, cfg.system.x, ivf);
        for (const auto& name : cfg.policies) {
            SolveRow row{ivf, name, {}, {}, {}, {}, {}, true, ""};
            if (name == "early") {
                const auto sr = search_k(sys, cfg.optimizer, SearchMode::Grid);
                const auto rate = eval_rate(sys, sr.k_star, sr.beta_star);
                row.k = sr.k_star;
                row.beta = sr.beta_star;
                row.aoi = sr.aoi_star;
                row.rate_lhs = rate.first;
                row.rate_rhs = rate.second;
                row.feasible = rate.first >= rate.second - kFeasSlack;
            } else if (name == "wait_ack") {
                const auto wa = wait_for_ack_optimum(sys, cfg.optimizer);
                const auto rate = eval_rate_wait_ack(sys, wa.beta_star);
                row.beta = wa.beta_star;
                row.aoi = wa.aoi;
                row.rate_lhs = rate.first;
                row.rate_rhs = rate.second;
                row.feasible = rate.first >= rate.second - kFeasSlack;
            } else {
                const auto pc =
                    periodic_period(sys, cfg.optimizer.window_epsilon);
                if (!pc) {
                    row.feasible = false;
                    row.note = "no admissible period window";
                } else {
                    row.k = pc->period;
                    if (pc->in_window) row.aoi = periodic_aoi(sys, pc->period);
                    row.rate_lhs = pc->rate_lhs;
                    row.rate_rhs = ivf;
                    if (!pc->in_window)
                        row.note = "closed form unavailable; simulation only";
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_solve_csv(std::ostream& os, const std::vector<SolveRow>& rows) {
    os << "inv_fmax,policy,k,beta,aoi,rate_lhs,rate_rhs,feasible,note\n";
    for (const auto& r : rows) {
        os << fmt_num(r.inv_fmax) << ',' << r.policy << ',' << fmt_opt(r.k)
           << ',' << fmt_opt(r.beta) << ',' << fmt_opt(r.aoi) << ','
           << fmt_opt(r.rate_lhs) << ',' << fmt_opt(r.rate_rhs) << ','
           << (r.feasible ? "true" : "false") << ',' << r.note << '\n';
    }
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
    struct Job {
        std::size_t ivf_index;
        std::string policy;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < cfg.inv_fmax_values.size(); ++i)
        for (const auto& p : cfg.policies) jobs.push_back({i, p});

    std::vector<SweepRow> rows(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t idx) {
        const Job& job = jobs[idx];
        const double ivf = cfg.inv_fmax_values[job.ivf_index];
        const SystemConfig sys(cfg.system.y, cfg.system.x, ivf);
        const SimConfig sim =
            row_sim_config(cfg, job.ivf_index, policy_rank(job.policy));
        SweepRow row{ivf, job.policy, {}, {}, {}, 0.0, 0.0, {}, {}, false};
        if (job.policy == "early") {
            const auto sr = search_k(sys, cfg.optimizer, SearchMode::Grid);
            const auto rate = eval_rate(sys, sr.k_star, sr.beta_star);
            // beta_star == 0 marks the always-busy regime, where the
            // threshold fires every cycle and the policy degenerates to
            // periodic sampling with period K.
            const PolicySpec policy =
                sr.beta_star > 0.0
                    ? PolicySpec(EarlySampling{sr.k_star, sr.beta_star})
                    : PolicySpec(PeriodicPreempt{sr.k_star});
            const auto ss = simulate(sys, policy, sim);
            row.k = sr.k_star;
            row.beta = sr.beta_star;
            row.aoi_closed = sr.aoi_star;
            row.aoi_sim = ss.avg_aoi;
            row.aoi_ci95 = ss.aoi_ci95;
            row.rate_lhs = rate.first;
            row.rate_rhs = rate.second;
        } else if (job.policy == "wait_ack") {
            const auto wa = wait_for_ack_optimum(sys, cfg.optimizer);
            const auto rate = eval_rate_wait_ack(sys, wa.beta_star);
            const auto ss = simulate(sys, WaitForAck{wa.beta_star}, sim);
            row.beta = wa.beta_star;
            row.aoi_closed = wa.aoi;
            row.aoi_sim = ss.avg_aoi;
            row.aoi_ci95 = ss.aoi_ci95;
            row.rate_lhs = rate.first;
            row.rate_rhs = rate.second;
        } else {
            const auto pc = periodic_period(sys, cfg.optimizer.window_epsilon);
            if (pc) {
                const auto ss = simulate(sys, PeriodicPreempt{pc->period}, sim);
                row.k = pc->period;
                if (pc->in_window)
                    row.aoi_closed = periodic_aoi(sys, pc->period);
                row.aoi_sim = ss.avg_aoi;
                row.aoi_ci95 = ss.aoi_ci95;
                row.rate_lhs = pc->rate_lhs;
                row.rate_rhs = ivf;
            }
        }
        if (row.rate_lhs)
            row.feasible =
                *row.rate_lhs >= row.rate_rhs.value_or(0.0) - kFeasSlack;
        rows[idx] = std::move(row);
    });
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "inv_fmax,policy,k,beta,aoi_closed,aoi_sim,aoi_ci95,rate_lhs,"
          "rate_rhs,feasible\n";
    for (const auto& r : rows) {
        os << fmt_num(r.inv_fmax) << ',' << r.policy << ',' << fmt_opt(r.k)
           << ',' << fmt_opt(r.beta) << ',' << fmt_opt(r.aoi_closed) << ','
           << fmt_num(r.aoi_sim) << ',' << fmt_num(r.aoi_ci95) << ','
           << fmt_opt(r.rate_lhs) << ',' << fmt_opt(r.rate_rhs) << ','
           << (r.feasible ? "true" : "false") << '\n';
    }
}

std::vector<KPoint> run_landscape(const ExperimentConfig& cfg, double k_min,
                                  double k_max, int points) {
    if (!(k_min > 0.0)) throw InvalidK("landscape requires k_min > 0");
    if (!(k_max > k_min)) throw InvalidRange("landscape requires k_max > k_min");
    if (points < 2) throw InvalidRange("landscape requires at least 2 points");
    std::vector<double> ks(static_cast<std::size_t>(points));
    const double h = (k_max - k_min) / (points - 1);
    for (int i = 0; i < points; ++i) ks[static_cast<std::size_t>(i)] = k_min + i * h;
    return k_landscape(cfg.system, cfg.optimizer, ks);
}

void write_landscape_csv(std::ostream& os, const std::vector<KPoint>& points) {
    os << "k,beta,aoi\n";
    for (const auto& p : points)
        os << fmt_num(p.k) << ',' << fmt_num(p.beta) << ',' << fmt_num(p.aoi)
           << '\n';
}

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace) {
    os << "time,event_kind,detail\n";
    for (const auto& t : trace)
        os << fmt_num(t.time) << ',' << trace_kind_name(t.kind) << ','
           << fmt_num(t.detail) << '\n';
}

void print_sim_stats(std::ostream& os, const SimStats& st) {
    os << "avg_aoi " << fmt_num(st.avg_aoi) << '\n'
       << "aoi_ci95 " << fmt_num(st.aoi_ci95) << '\n'
       << "mean_intersample " << fmt_num(st.mean_intersample) << '\n'
       << "cycles_completed " << st.cycles_completed << '\n'
       << "samples_taken " << st.samples_taken << '\n'
       << "corrupted_samples " << st.corrupted_samples << '\n'
       << "preemptions " << st.preemptions << '\n'
       << "empirical_p " << fmt_num(st.empirical_p) << '\n'
       << "sim_time " << fmt_num(st.sim_time) << '\n';
}

}  // namespace aoi
