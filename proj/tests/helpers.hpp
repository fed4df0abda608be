#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "aoi/censored_moments.hpp"
#include "aoi/delay_model.hpp"
#include "aoi/random.hpp"
#include "aoi/simulator.hpp"
#include "aoi/system_config.hpp"

namespace aoi::test {

// Replays a trace and checks the structural invariants:
//  - event times are nondecreasing, ACK times strictly increasing
//  - every DELIVER/ACK refers to an earlier SAMPLE/DELIVER
//  - the age sawtooth only drops at uncorrupted deliveries, to that sample's
//    service time
//  - at most `max_samples_between_acks` SAMPLE events between consecutive ACKs
struct TraceCheck {
    int violations = 0;
    std::uint64_t age_drops = 0;

    TraceCheck(const std::vector<TraceRecord>& trace,
               int max_samples_between_acks) {
        std::map<double, bool> samples;           // gen -> corrupted flag
        std::map<double, double> deliveries;      // delivery time -> gen
        double last_t = -1.0, last_ack = -1.0;
        double age = 0.0, age_t = 0.0;
        int samples_since_ack = 0;
        for (const auto& ev : trace) {
            if (ev.time < last_t - 1e-12) ++violations;
            last_t = std::max(last_t, ev.time);
            switch (ev.kind) {
                case TraceKind::Sample:
                    samples.emplace(ev.detail, false);
                    if (++samples_since_ack > max_samples_between_acks)
                        ++violations;
                    break;
                case TraceKind::Corrupt: {
                    const auto it = samples.find(ev.detail);
                    if (it == samples.end())
                        ++violations;
                    else
                        it->second = true;
                    break;
                }
                case TraceKind::Deliver: {
                    const auto it = samples.find(ev.detail);
                    if (it == samples.end()) {
                        ++violations;
                        break;
                    }
                    deliveries.emplace(ev.time, ev.detail);
                    age += ev.time - age_t;
                    age_t = ev.time;
                    if (!it->second) {
                        // uncorrupted: the sawtooth drops to this sample's
                        // service time; corrupted deliveries leave it alone
                        const double fresh = ev.time - ev.detail;
                        if (fresh > age + 1e-9) ++violations;
                        age = fresh;
                        ++age_drops;
                    }
                    break;
                }
                case TraceKind::Ack:
                    if (!(ev.time > last_ack)) ++violations;
                    last_ack = ev.time;
                    if (!deliveries.count(ev.detail)) ++violations;
                    samples_since_ack = 0;
                    break;
                default:
                    break;
            }
        }
    }
};

// Monte Carlo estimate of the conditional moments of max(beta, X+Y) and
// max(beta^2, (X+Y)^2) on the complement of {Y < K < Y+X}, by rejection.
struct McCensored {
    double p;  // empirical busy-window probability
    double r_mean, r_se;
    double q_mean, q_se;
    std::uint64_t accepted;
};

inline McCensored mc_censored(const SystemConfig& cfg, double k, double beta,
                              std::uint64_t n, std::uint64_t seed) {
    RandomStream yr(derive_seed(seed, 11));
    RandomStream xr(derive_seed(seed, 12));
    std::uint64_t acc = 0;
    double sr = 0, sr2 = 0, sq = 0, sq2 = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double y = cfg.y.sample(yr);
        const double x = cfg.x.sample(xr);
        if (y < k && k < y + x) continue;  // busy window: rejected
        ++acc;
        const double u = y + x;
        const double r = std::max(beta, u);
        const double q = std::max(beta * beta, u * u);
        sr += r;
        sr2 += r * r;
        sq += q;
        sq2 += q * q;
    }
    McCensored out{};
    out.accepted = acc;
    out.p = 1.0 - static_cast<double>(acc) / static_cast<double>(n);
    if (acc > 1) {
        const double m = static_cast<double>(acc);
        out.r_mean = sr / m;
        out.q_mean = sq / m;
        out.r_se = std::sqrt(std::max(0.0, sr2 / m - out.r_mean * out.r_mean) / m);
        out.q_se = std::sqrt(std::max(0.0, sq2 / m - out.q_mean * out.q_mean) / m);
    }
    return out;
}

// Random system drawn from the experiment families, honoring sup X <= inf Y.
inline SystemConfig random_system(RandomStream& rng, double inv_fmax) {
    const auto pick_y = [&]() -> DelayModel {
        const double u = rng.uniform();
        if (u < 1.0 / 3.0) return DelayModel::constant(5.0 + 10.0 * rng.uniform());
        if (u < 2.0 / 3.0) {
            const double lo = 5.0 + 5.0 * rng.uniform();
            return DelayModel::uniform(lo, lo + 1.0 + 5.0 * rng.uniform());
        }
        return DelayModel::shifted_exponential(5.0 + 10.0 * rng.uniform(),
                                               0.5 + 1.5 * rng.uniform());
    };
    DelayModel y = pick_y();
    const double inf_y = y.support_bounds().inf;
    DelayModel x = rng.uniform() < 0.5
                       ? DelayModel::constant((0.2 + 0.8 * rng.uniform()) * inf_y)
                       : DelayModel::uniform(
                             0.0, (0.3 + 0.7 * rng.uniform()) * inf_y);
    return SystemConfig(std::move(y), std::move(x), inv_fmax);
}

// A K value with 0 < p < 1 (resampled until the conditioning is nondegenerate).
inline double random_k(RandomStream& rng, const SystemConfig& cfg) {
    const double inf_y = cfg.y.support_bounds().inf;
    for (int tries = 0; tries < 100; ++tries) {
        const double k = inf_y * (0.3 + 2.2 * rng.uniform());
        if (busy_window_prob(cfg, k) < 1.0 - 1e-9) return k;
    }
    return 0.5 * inf_y;
}

}  // namespace aoi::test
