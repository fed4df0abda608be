#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "aoi/errors.hpp"
#include "aoi/experiments.hpp"

namespace aoi {

namespace {

// Picks the output stream: --out wins, then the config's csv_path, then stdout.
class OutputTarget {
  public:
    OutputTarget(const std::string& cli_path, const std::string& cfg_path) {
        const std::string& path = !cli_path.empty() ? cli_path : cfg_path;
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw ConfigError("cannot open output file: " + path);
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::string trace_path;
    std::string policy = "early";
    std::uint64_t seed = 0;
    std::uint64_t cycles = 0;
    double k_min = 0.0;
    double k_max = 0.0;
    int points = 200;
    bool have_seed = false;
    bool have_cycles = false;
};

ExperimentConfig load_with_overrides(const CliOptions& o) {
    ExperimentConfig cfg = load_config(o.config_path);
    if (o.have_seed) cfg.simulator.seed = o.seed;
    if (o.have_cycles) cfg.simulator.cycles = o.cycles;
    return cfg;
}

// Solves for the requested policy's parameters, then simulates it, printing
// summary statistics and optionally a full event trace.
int cmd_simulate(const CliOptions& o) {
    const ExperimentConfig cfg = load_with_overrides(o);
    PolicySpec policy;
    if (o.policy == "early") {
        const auto sr = search_k(cfg.system, cfg.optimizer, SearchMode::Grid);
        // beta_star == 0 marks the always-busy regime, where the policy
        // degenerates to periodic sampling with period K.
        if (sr.beta_star > 0.0)
            policy = EarlySampling{sr.k_star, sr.beta_star};
        else
            policy = PeriodicPreempt{sr.k_star};
    } else if (o.policy == "wait_ack") {
        const auto wa = wait_for_ack_optimum(cfg.system, cfg.optimizer);
        policy = WaitForAck{wa.beta_star};
    } else if (o.policy == "periodic") {
        const auto period = periodic_baseline_period(
            cfg.system, cfg.optimizer.window_epsilon);
        if (!period)
            throw ConfigError(
                "periodic policy needs a finite sampling-rate limit or an "
                "admissible period window");
        policy = PeriodicPreempt{*period};
    } else {
        throw ConfigError("unknown policy '" + o.policy +
                          "' (expected early, wait_ack, or periodic)");
    }

    const std::string trace_path =
        !o.trace_path.empty() ? o.trace_path : cfg.trace_path;
    std::vector<TraceRecord> trace;
    const SimStats st = simulate(cfg.system, policy, cfg.simulator,
                                 trace_path.empty() ? nullptr : &trace);
    if (!trace_path.empty()) {
        std::ofstream tf(trace_path);
        if (!tf) throw ConfigError("cannot open trace file: " + trace_path);
        write_trace(tf, trace);
    }
    OutputTarget out(o.out_path, cfg.csv_path);
    print_sim_stats(out.stream(), st);
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Optimal sampling for minimum age of information under "
                 "delayed acknowledgements"};
    app.require_subcommand(1);

    CliOptions o;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON experiment config")
            ->required();
        sub->add_option("--out", o.out_path, "output file (default: stdout)");
    };
    const auto add_sim_overrides = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "override simulator seed")
            ->each([&](const std::string&) { o.have_seed = true; });
        sub->add_option("--cycles", o.cycles, "override simulated cycles")
            ->each([&](const std::string&) { o.have_cycles = true; });
    };

    CLI::App* solve = app.add_subcommand(
        "solve", "closed-form optimal policies for each rate limit");
    add_common(solve);

    CLI::App* sweep = app.add_subcommand(
        "sweep", "closed-form vs simulated age across rate limits");
    add_common(sweep);
    add_sim_overrides(sweep);

    CLI::App* landscape = app.add_subcommand(
        "landscape", "age as a function of the threshold K");
    add_common(landscape);
    landscape->add_option("--k-min", o.k_min, "smallest K")->required();
    landscape->add_option("--k-max", o.k_max, "largest K")->required();
    landscape->add_option("--points", o.points, "grid size (default 200)");

    CLI::App* simulate_cmd = app.add_subcommand(
        "simulate", "simulate one policy and report statistics");
    add_common(simulate_cmd);
    add_sim_overrides(simulate_cmd);
    simulate_cmd->add_option("--policy", o.policy,
                             "early | wait_ack | periodic");
    simulate_cmd->add_option("--trace", o.trace_path, "event trace output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) {
            const ExperimentConfig cfg = load_with_overrides(o);
            OutputTarget out(o.out_path, cfg.csv_path);
            write_solve_csv(out.stream(), run_solve(cfg));
            return 0;
        }
        if (sweep->parsed()) {
            const ExperimentConfig cfg = load_with_overrides(o);
            OutputTarget out(o.out_path, cfg.csv_path);
            write_sweep_csv(out.stream(), run_sweep(cfg));
            return 0;
        }
        if (landscape->parsed()) {
            const ExperimentConfig cfg = load_with_overrides(o);
            OutputTarget out(o.out_path, cfg.csv_path);
            write_landscape_csv(out.stream(),
                                run_landscape(cfg, o.k_min, o.k_max, o.points));
            return 0;
        }
        return cmd_simulate(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace aoi
