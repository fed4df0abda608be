#include "aoi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "aoi/errors.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/random.hpp"

namespace aoi {

const char* trace_kind_name(TraceKind kind) {
    switch (kind) {
        case TraceKind::Sample: return "SAMPLE";
        case TraceKind::Corrupt: return "CORRUPT";
        case TraceKind::Deliver: return "DELIVER";
        case TraceKind::Ack: return "ACK";
        case TraceKind::Preempt: return "PREEMPT";
        case TraceKind::State1: return "STATE1";
        case TraceKind::State2: return "STATE2";
    }
    return "?";
}

namespace {

struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

// Per-cycle (or per-batch) reward/length accumulator for the regenerative
// ratio estimator.
struct Accum {
    std::uint64_t n = 0;
    KahanSum sum_r;
    KahanSum sum_tau;
    double sum_r2 = 0.0;
    double sum_tau2 = 0.0;
    double sum_rtau = 0.0;
    std::uint64_t sum_samples = 0;
    double sum_samples2 = 0.0;

    void add(double r, double tau, std::uint64_t samples) {
        ++n;
        sum_r.add(r);
        sum_tau.add(tau);
        sum_r2 += r * r;
        sum_tau2 += tau * tau;
        sum_rtau += r * tau;
        sum_samples += samples;
        sum_samples2 += static_cast<double>(samples) * static_cast<double>(samples);
    }

    double avg_aoi() const { return sum_r.value() / sum_tau.value(); }

    // Standard error of the ratio estimator.
    double aoi_se() const {
        if (n < 2) return 0.0;
        const double a = avg_aoi();
        const double v = std::max(
            0.0, sum_r2 - 2.0 * a * sum_rtau + a * a * sum_tau2);
        return std::sqrt(v) / sum_tau.value();
    }

    double mean_tau() const { return sum_tau.value() / static_cast<double>(n); }
    double se_tau() const {
        if (n < 2) return 0.0;
        const double m = mean_tau();
        const double var =
            std::max(0.0, sum_tau2 / static_cast<double>(n) - m * m);
        return std::sqrt(var / static_cast<double>(n));
    }
    double mean_samples() const {
        return static_cast<double>(sum_samples) / static_cast<double>(n);
    }
    double se_samples() const {
        if (n < 2) return 0.0;
        const double m = mean_samples();
        const double var =
            std::max(0.0, sum_samples2 / static_cast<double>(n) - m * m);
        return std::sqrt(var / static_cast<double>(n));
    }
};

std::uint64_t resolve_warmup(const SimConfig& sim) {
    if (sim.warmup_cycles != SimConfig::kAutoWarmup) return sim.warmup_cycles;
    return std::max<std::uint64_t>(100, sim.cycles / 50);
}

struct RunResult {
    Accum acc;
    std::uint64_t samples_taken = 0;
    std::uint64_t corrupted_samples = 0;
    std::uint64_t preemptions = 0;
    std::uint64_t state1_stays = 0;
    std::uint64_t state2_transitions = 0;
    double empirical_p = 0.0;
};

class Runner {
public:
    Runner(const SystemConfig& cfg, const SimConfig& sim,
           std::vector<TraceRecord>* trace)
        : cfg_(cfg),
          y_rng_(derive_seed(sim.seed, 1)),
          x_rng_(derive_seed(sim.seed, 2)),
          max_events_(sim.max_events),
          trace_(trace) {}

protected:
    double draw_y() { return cfg_.y.sample(y_rng_); }
    double draw_x() { return cfg_.x.sample(x_rng_); }

    void emit(double t, TraceKind kind, double detail) {
        tick();
        if (trace_) trace_->push_back({t, kind, detail});
    }

    void tick() {
        if (++events_ > max_events_)
            throw EventCapExceeded("simulation exceeded max_events");
    }

    void check_ack_order(double ack_time) {
        if (!(ack_time > last_ack_))
            throw std::logic_error("ACK ordering violated");
        last_ack_ = ack_time;
    }

    // Piecewise-linear age integration; drops happen only at uncorrupted
    // deliveries.
    void advance(double t) {
        const double seg = t - last_t_;
        if (recording_) cycle_integral_ += seg * age_ + 0.5 * seg * seg;
        age_ += seg;
        last_t_ = t;
    }

    void deliver_fresh(double t, double gen) {
        advance(t);
        age_ = t - gen;  // drops to the sample's service time
        emit(t, TraceKind::Deliver, gen);
    }

    const SystemConfig& cfg_;
    RandomStream y_rng_;
    RandomStream x_rng_;
    std::uint64_t max_events_;
    std::vector<TraceRecord>* trace_;
    std::uint64_t events_ = 0;
    double last_ack_ = -1.0;

    double last_t_ = 0.0;
    double age_ = 0.0;
    double cycle_integral_ = 0.0;
    bool recording_ = false;
};

class EarlyRunner : Runner {
public:
    EarlyRunner(const SystemConfig& cfg, double k, double beta,
                const SimConfig& sim, std::vector<TraceRecord>* trace)
        : Runner(cfg, sim, trace), k_(k), beta_(beta) {
        if (!(k > 0.0) || !(beta >= 0.0))
            throw std::invalid_argument("EarlySampling requires k > 0, beta >= 0");
    }

    RunResult run(const SimConfig& sim) {
        const std::uint64_t warmup = resolve_warmup(sim);
        RunResult res;
        double s = 0.0;  // current state-1 reference sample time
        double cycle_start = 0.0;
        std::uint64_t cycle_samples = 0;
        std::uint64_t completed = 0;
        std::uint64_t stays_in_cycle = 0;
        recording_ = warmup == 0;

        const auto count_sample = [&](double t, bool corrupted) {
            emit(t, TraceKind::Sample, t);
            if (corrupted) emit(t, TraceKind::Corrupt, t);
            ++cycle_samples;
        };

        const auto end_cycle = [&](double t) {
            advance(t);
            if (recording_)
                res.acc.add(cycle_integral_, t - cycle_start, cycle_samples);
            ++completed;
            recording_ = completed >= warmup;
            cycle_integral_ = 0.0;
            cycle_start = t;
            cycle_samples = 0;
            stays_in_cycle = 0;
        };

        count_sample(0.0, false);
        while (completed < sim.cycles) {
            const double y = draw_y();
            const double x = draw_x();
            const double d = s + y;
            const double a = d + x;
            const double sched = s + k_;
            check_ack_order(a);
            if (a <= sched) {
                // ACK wins the race; the scheduled sample is cancelled.
                deliver_fresh(d, s);
                emit(a, TraceKind::Ack, d);
                emit(a, TraceKind::State2, 0.0);
                if (recording_) ++res.state2_transitions;
                const double s2 = a + std::max(0.0, beta_ - (y + x));
                end_cycle(s2);
                count_sample(s2, false);
                s = s2;
            } else if (sched < d) {
                // Early sample lands while the channel is busy: corrupted.
                count_sample(sched, true);
                if (recording_) ++res.corrupted_samples;
                deliver_fresh(d, s);
                emit(a, TraceKind::Ack, d);
                emit(a, TraceKind::State2, 0.0);
                if (recording_) ++res.state2_transitions;
                const double s2 = a + std::max(0.0, beta_ - (y + x));
                const double yc = draw_y();  // corrupted sample's service time
                const double cd = d + yc;
                if (cd <= s2) {
                    advance(cd);
                    emit(cd, TraceKind::Deliver, sched);  // corrupted, no drop
                } else {
                    emit(s2, TraceKind::Preempt, sched);
                    if (recording_) ++res.preemptions;
                }
                end_cycle(s2);
                count_sample(s2, false);
                s = s2;
            } else {
                // Sample taken after delivery, before the ACK: stay in state 1.
                deliver_fresh(d, s);
                count_sample(sched, false);
                emit(a, TraceKind::Ack, d);
                emit(a, TraceKind::State1, 0.0);
                if (recording_) ++res.state1_stays;
                s = sched;
                // In the p ~ 1 regime state-2 regenerations (the natural
                // cycle boundaries) may never occur; fall back to
                // fixed-count batches so the run still terminates with
                // valid time averages.
                if (++stays_in_cycle >= 1000) end_cycle(a);
            }
        }
        res.samples_taken = res.acc.sum_samples;
        const double decisions = static_cast<double>(res.state1_stays +
                                                     res.state2_transitions);
        res.empirical_p =
            decisions > 0.0 ? static_cast<double>(res.state1_stays) / decisions
                            : 0.0;
        return res;
    }

private:
    double k_;
    double beta_;
};

class WaitAckRunner : Runner {
public:
    WaitAckRunner(const SystemConfig& cfg, double beta, const SimConfig& sim,
                  std::vector<TraceRecord>* trace)
        : Runner(cfg, sim, trace), beta_(beta) {
        if (!(beta >= 0.0))
            throw std::invalid_argument("WaitForAck requires beta >= 0");
    }

    RunResult run(const SimConfig& sim) {
        const std::uint64_t warmup = resolve_warmup(sim);
        RunResult res;
        double s = 0.0;
        recording_ = warmup == 0;
        emit(0.0, TraceKind::Sample, 0.0);
        for (std::uint64_t i = 0; i < sim.cycles; ++i) {
            const double y = draw_y();
            const double x = draw_x();
            const double d = s + y;
            const double a = d + x;
            check_ack_order(a);
            deliver_fresh(d, s);
            emit(a, TraceKind::Ack, d);
            emit(a, TraceKind::State2, 0.0);
            const double s2 = a + std::max(0.0, beta_ - (y + x));
            advance(s2);
            if (recording_) {
                res.acc.add(cycle_integral_, s2 - s, 1);
                ++res.state2_transitions;
            }
            cycle_integral_ = 0.0;
            recording_ = (i + 1) >= warmup;
            emit(s2, TraceKind::Sample, s2);
            s = s2;
        }
        res.samples_taken = res.acc.sum_samples;
        res.empirical_p = 0.0;
        return res;
    }

private:
    double beta_;
};

class PeriodicRunner : Runner {
public:
    PeriodicRunner(const SystemConfig& cfg, double period, const SimConfig& sim,
                   std::vector<TraceRecord>* trace)
        : Runner(cfg, sim, trace), period_(period) {
        if (!(period > 0.0))
            throw std::invalid_argument("PeriodicPreempt requires period > 0");
    }

    RunResult run(const SimConfig& sim) {
        const std::uint64_t warmup = resolve_warmup(sim);
        constexpr std::uint64_t kBatchSamples = 1000;
        RunResult res;
        recording_ = warmup == 0;

        struct InFlight {
            double gen;
            bool corrupted;
            double done;
        };
        std::optional<InFlight> server;
        std::optional<double> queued_gen;  // capacity-1 storage, corrupted
        struct PendingAck {
            double time;
            double delivery;
        };
        std::optional<PendingAck> ack;

        std::uint64_t scheduled = 0;
        std::uint64_t batch_count = 0;
        double batch_start = static_cast<double>(warmup) * period_;
        std::uint64_t batch_samples = 0;
        std::uint64_t uncorrupted = 0;

        const auto take_sample = [&](double t, bool scheduled_sample) {
            emit(t, TraceKind::Sample, t);
            if (recording_) ++batch_samples;
            if (!server) {
                server = InFlight{t, false, t + draw_y()};
                if (recording_) ++uncorrupted;
            } else if (!queued_gen) {
                queued_gen = t;
                emit(t, TraceKind::Corrupt, t);
                if (recording_) ++res.corrupted_samples;
            } else {
                // storage full: the sample is lost outright
                emit(t, TraceKind::Corrupt, t);
                if (recording_) ++res.corrupted_samples;
            }
            (void)scheduled_sample;
        };

        const auto complete = [&](double t) {
            const InFlight fly = *server;
            server.reset();
            if (!fly.corrupted) {
                deliver_fresh(t, fly.gen);
            } else {
                advance(t);
                emit(t, TraceKind::Deliver, fly.gen);  // no age change
            }
            const double ack_time = t + draw_x();
            check_ack_order(ack_time);
            ack = PendingAck{ack_time, t};
            if (queued_gen) {
                server = InFlight{*queued_gen, true, t + draw_y()};
                queued_gen.reset();
            }
        };

        const auto handle_ack = [&](double t, double delivery) {
            emit(t, TraceKind::Ack, delivery);
            if (server && server->gen < delivery) {
                // Known-corrupted transmission: preempt with a fresh sample.
                emit(t, TraceKind::Preempt, server->gen);
                if (recording_) ++res.preemptions;
                queued_gen.reset();
                server = InFlight{t, false, t + draw_y()};
                emit(t, TraceKind::Sample, t);
                if (recording_) {
                    ++batch_samples;
                    ++uncorrupted;
                }
            }
        };

        const double t_end = static_cast<double>(sim.cycles) * period_;
        while (true) {
            double t_next = t_end;
            int which = 0;  // 0 = end, 1 = sample, 2 = completion, 3 = ack
            if (scheduled < sim.cycles) {
                const double ts = static_cast<double>(scheduled) * period_;
                if (ts < t_next) {
                    t_next = ts;
                    which = 1;
                }
            }
            if (server && server->done <= t_next) {
                t_next = server->done;
                which = 2;
            }
            if (ack && ack->time <= t_next) {
                t_next = ack->time;
                which = 3;
            }
            if (which == 0) break;
            tick();
            switch (which) {
                case 1: {
                    // batch bookkeeping on scheduled samples
                    if (scheduled == warmup) {
                        advance(t_next);
                        recording_ = true;
                        cycle_integral_ = 0.0;
                        batch_start = t_next;
                        batch_samples = 0;
                    }
                    if (recording_ && scheduled > warmup &&
                        (scheduled - warmup) % kBatchSamples == 0) {
                        advance(t_next);
                        res.acc.add(cycle_integral_, t_next - batch_start,
                                    batch_samples);
                        ++batch_count;
                        cycle_integral_ = 0.0;
                        batch_start = t_next;
                        batch_samples = 0;
                    }
                    take_sample(t_next, true);
                    ++scheduled;
                    break;
                }
                case 2:
                    complete(t_next);
                    break;
                case 3: {
                    const PendingAck pa = *ack;
                    ack.reset();
                    handle_ack(pa.time, pa.delivery);
                    break;
                }
            }
        }
        // close the final partial batch
        if (recording_ && batch_samples > 0) {
            advance(t_end);
            res.acc.add(cycle_integral_, t_end - batch_start, batch_samples);
        }
        res.samples_taken = res.acc.sum_samples;
        res.empirical_p =
            res.samples_taken > 0
                ? static_cast<double>(uncorrupted) /
                      static_cast<double>(res.samples_taken)
                : 0.0;
        return res;
    }

private:
    double period_;
};

SimStats to_stats(const RunResult& res) {
    SimStats st;
    st.cycles_completed = res.acc.n;
    st.samples_taken = res.samples_taken;
    st.corrupted_samples = res.corrupted_samples;
    st.preemptions = res.preemptions;
    st.sim_time = res.acc.sum_tau.value();
    st.avg_aoi = res.acc.n > 0 ? res.acc.avg_aoi() : 0.0;
    st.aoi_ci95 = 1.96 * res.acc.aoi_se();
    st.mean_intersample =
        res.samples_taken > 0
            ? st.sim_time / static_cast<double>(res.samples_taken)
            : 0.0;
    st.empirical_p = res.empirical_p;
    return st;
}

RunResult run_policy(const SystemConfig& cfg, const PolicySpec& policy,
                     const SimConfig& sim, std::vector<TraceRecord>* trace) {
    return std::visit(
        [&](const auto& p) -> RunResult {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, EarlySampling>) {
                return EarlyRunner(cfg, p.k, p.beta, sim, trace).run(sim);
            } else if constexpr (std::is_same_v<T, WaitForAck>) {
                return WaitAckRunner(cfg, p.beta, sim, trace).run(sim);
            } else {
                return PeriodicRunner(cfg, p.period, sim, trace).run(sim);
            }
        },
        policy);
}

}  // namespace

SimStats simulate(const SystemConfig& cfg, const PolicySpec& policy,
                  const SimConfig& sim, std::vector<TraceRecord>* trace) {
    return to_stats(run_policy(cfg, policy, sim, trace));
}

ValidationReport validate_against_closed_form(const SystemConfig& cfg, double k,
                                              double beta,
                                              const SimConfig& sim) {
    const RunResult res =
        run_policy(cfg, EarlySampling{k, beta}, sim, nullptr);
    const SimStats st = to_stats(res);

    ValidationReport rep{};
    rep.sim_aoi = st.avg_aoi;
    rep.formula_aoi = eval_aoi(cfg, k, beta);
    const double se_aoi = res.acc.aoi_se();
    rep.z_score = se_aoi > 0.0 ? (st.avg_aoi - rep.formula_aoi) / se_aoi : 0.0;

    rep.empirical_p = st.empirical_p;
    rep.formula_p = busy_window_prob(cfg, k);

    const double p = rep.formula_p;
    const auto m = cycle_moments(cfg, k, beta);
    const double one_plus_late = 1.0 + late_ack_prob(cfg, k);
    rep.cycle_len_formula = m.r / (1.0 - p);
    rep.samples_per_cycle_formula = one_plus_late / (1.0 - p);
    rep.rate_formula = m.r / one_plus_late;

    rep.cycle_len_sim = res.acc.mean_tau();
    const double se_tau = res.acc.se_tau();
    rep.z_cycle_len =
        se_tau > 0.0 ? (rep.cycle_len_sim - rep.cycle_len_formula) / se_tau : 0.0;

    rep.samples_per_cycle_sim = res.acc.mean_samples();
    const double se_n = res.acc.se_samples();
    rep.z_samples_per_cycle =
        se_n > 0.0
            ? (rep.samples_per_cycle_sim - rep.samples_per_cycle_formula) / se_n
            : 0.0;

    rep.rate_sim = st.mean_intersample;
    return rep;
}

}  // namespace aoi
