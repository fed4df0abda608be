#include "aoi/censored_moments.hpp"

#include <algorithm>
#include <cmath>

#include "aoi/errors.hpp"
#include "aoi/quadrature.hpp"

namespace aoi {

namespace {

constexpr double kProbTol = 1e-9;
constexpr double kMomentTol = 1e-8;
constexpr double kTruncQuantile = 1.0 - 1e-12;
constexpr double kDegenerateEps = 1e-12;

// E[(x + y)^j 1{lo < x <= hi}] over the X marginal, fixed y.
double inner_sum_moment(const DelayModel& x, double y, int j, double lo,
                        double hi) {
    const double p0 = x.partial_moment(0, lo, hi);
    if (j == 0) return p0;
    const double p1 = x.partial_moment(1, lo, hi);
    if (j == 1) return p1 + y * p0;
    const double p2 = x.partial_moment(2, lo, hi);
    return p2 + 2.0 * y * p1 + y * y * p0;
}

// E[U^j 1{U > beta} restricted] for fixed y, where U = X + y. In censored
// mode the restriction set is {y >= K} union {U <= K}.
double tail_at_y(const SystemConfig& cfg, double k, double beta, MomentMode mode,
                 int j, double y) {
    const double lo = beta - y;
    if (mode == MomentMode::Unconditioned || y >= k)
        return inner_sum_moment(cfg.x, y, j, lo, kInfiniteTime);
    return inner_sum_moment(cfg.x, y, j, lo, k - y);
}

// E[1{U <= beta} restricted] for fixed y (computed directly rather than as
// set_prob minus the tail, which would cancel).
double cdf_at_y(const SystemConfig& cfg, double k, double beta, MomentMode mode,
                double y) {
    double hi = beta - y;
    if (mode == MomentMode::Censored && y < k) hi = std::min(hi, k - y);
    return inner_sum_moment(cfg.x, y, 0, -kInfiniteTime, hi);
}

template <class F>
double integrate_over_y(const SystemConfig& cfg, double k, double beta,
                        const F& h) {
    const auto ys = cfg.y.support_bounds();
    if (cfg.y.is_constant()) return h(ys.inf);
    const double hi = std::min(ys.sup, cfg.y.quantile(kTruncQuantile));
    const auto xs = cfg.x.support_bounds();
    std::vector<double> breaks = {k, k - xs.inf, beta - xs.inf};
    if (std::isfinite(xs.sup)) {
        breaks.push_back(k - xs.sup);
        breaks.push_back(beta - xs.sup);
    }
    const auto f = [&](double y) { return cfg.y.pdf(y) * h(y); };
    return integrate_split(f, ys.inf, hi, std::move(breaks), kMomentTol);
}

bool in_theorem3_window(const SystemConfig& cfg, double k) {
    const auto ys = cfg.y.support_bounds();
    const auto xs = cfg.x.support_bounds();
    return ys.sup < k && k < ys.inf + xs.inf;
}

}  // namespace

double busy_window_prob(const SystemConfig& cfg, double k) {
    const auto ys = cfg.y.support_bounds();
    const auto xs = cfg.x.support_bounds();
    if (k <= ys.inf) return 0.0;
    if (in_theorem3_window(cfg, k)) return 1.0;
    // P(Y < K < Y+X) = E[1{Y < K} (1 - F_X(K - Y))]
    if (cfg.y.is_constant()) {
        const double c = ys.inf;
        return c < k ? 1.0 - cfg.x.cdf(k - c) : 0.0;
    }
    double lo = ys.inf;
    if (std::isfinite(xs.sup)) lo = std::max(lo, k - xs.sup);
    const double hi = std::min({k, ys.sup, cfg.y.quantile(kTruncQuantile)});
    const auto f = [&](double y) {
        return cfg.y.pdf(y) * (1.0 - cfg.x.cdf(k - y));
    };
    const double p =
        integrate_split(f, lo, hi, {k - xs.inf, k - xs.sup}, kProbTol);
    return std::clamp(p, 0.0, 1.0);
}

double late_ack_prob(const SystemConfig& cfg, double k) {
    return 1.0 - cfg.y.cdf(k);
}

RestrictedMaxMoments restricted_max_moments(const SystemConfig& cfg, double k,
                                            double beta, MomentMode mode,
                                            double set_prob) {
    const auto tail = [&](int j) {
        return integrate_over_y(cfg, k, beta, [&](double y) {
            return tail_at_y(cfg, k, beta, mode, j, y);
        });
    };
    double c0 = 0.0;
    if (beta > 0.0) {
        c0 = integrate_over_y(cfg, k, beta, [&](double y) {
            return cdf_at_y(cfg, k, beta, mode, y);
        });
        c0 = std::clamp(c0, 0.0, set_prob);
    }
    const double t1 = tail(1);
    const double t2 = tail(2);
    return {beta * c0 + t1, beta * beta * c0 + t2};
}

CensoredMoments censored_conditional_moments(const SystemConfig& cfg, double k,
                                             double beta) {
    const double p = busy_window_prob(cfg, k);
    const double pnb = 1.0 - p;
    if (pnb < kDegenerateEps)
        throw DegenerateConditioning(
            "complement of the busy window has probability ~0 (p = 1 regime)");
    const auto m =
        restricted_max_moments(cfg, k, beta, MomentMode::Censored, pnb);
    return {m.m1 / pnb, m.m2 / pnb};
}

}  // namespace aoi
