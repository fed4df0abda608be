#include "aoi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aoi/errors.hpp"
#include "aoi/quadrature.hpp"

namespace aoi {

namespace {

constexpr double kPOneEps = 1e-12;
constexpr double kFeasSlack = 1e-9;

// One (K, f_max) instance of the threshold fixed point; p and T are cached
// across bisection iterations.
struct FixedPointProblem {
    const SystemConfig* cfg;
    double k;
    MomentMode mode;
    double p;
    double t;

    CycleMoments moments(double beta) const {
        const auto m =
            restricted_max_moments(*cfg, k, beta, mode, 1.0 - p);
        return {p, t, m.m2 + p * k * k, m.m1 + p * k};
    }
};

FixedPointProblem censored_problem(const SystemConfig& cfg, double k) {
    const double p = busy_window_prob(cfg, k);
    const double t =
        cfg.unconstrained() ? 0.0 : (1.0 + late_ack_prob(cfg, k)) * cfg.inv_fmax;
    return {&cfg, k, MomentMode::Censored, p, t};
}

FixedPointProblem wait_ack_problem(const SystemConfig& cfg) {
    return {&cfg, 0.0, MomentMode::Unconditioned, 0.0, cfg.inv_fmax};
}

double default_u0(const SystemConfig& cfg) {
    return 4.0 * (cfg.x.mean() + cfg.y.mean() + cfg.inv_fmax);
}

double solve_fixed_point(const FixedPointProblem& prob,
                         const OptimizerConfig& opt) {
    const auto diff = [&](double beta) {
        const auto m = prob.moments(beta);
        return m.r - std::max(m.t_rate, m.q / (2.0 * beta));
    };
    double u = opt.u0 > 0.0 ? opt.u0 : default_u0(*prob.cfg);
    int doublings = 0;
    while (diff(u) <= 0.0) {
        u *= 2.0;
        if (++doublings > 60)
            throw BracketFailure(
                "could not bracket the threshold fixed point within 60 "
                "doublings of u0");
    }
    double l = 0.0;
    const double eps = opt.eps > 0.0 ? opt.eps : 1e-9 * u;
    while (u - l > eps) {
        const double mid = 0.5 * (l + u);
        if (diff(mid) <= 0.0)
            l = mid;
        else
            u = mid;
    }
    // Return the upper bracket end, where diff > 0 holds: there
    // r(beta) > max(T, Q/(2 beta)) >= T, so the reported rate lhs never
    // dips below the limit by bisection round-off when the constraint binds.
    return u;
}

struct KEval {
    double k;
    double beta;
    double aoi;
    double rate_lhs;
    double rate_rhs;
    bool feasible;
};

KEval evaluate_k(const SystemConfig& cfg, const OptimizerConfig& opt, double k) {
    const double ey = cfg.y.mean();
    const auto prob = censored_problem(cfg, k);
    const double rhs =
        cfg.unconstrained() ? 0.0 : (1.0 + late_ack_prob(cfg, k)) * cfg.inv_fmax;
    if (prob.p >= 1.0 - kPOneEps) {
        // Only state-1 transitions; the cycle is exactly one period K.
        return {k, 0.0, 0.5 * k + ey, k, rhs, k >= rhs - kFeasSlack};
    }
    const double beta = solve_fixed_point(prob, opt);
    const auto m = prob.moments(beta);
    return {k,   beta, m.q / (2.0 * m.r) + ey,
            m.r, rhs,  m.r >= rhs - kFeasSlack};
}

}  // namespace

CycleMoments cycle_moments(const SystemConfig& cfg, double k, double beta) {
    return censored_problem(cfg, k).moments(beta);
}

CycleMoments cycle_moments_wait_ack(const SystemConfig& cfg, double beta) {
    return wait_ack_problem(cfg).moments(beta);
}

double eval_aoi(const SystemConfig& cfg, double k, double beta) {
    if (!(k > 0.0)) throw InvalidK("eval_aoi requires k > 0");
    const double p = busy_window_prob(cfg, k);
    const double ey = cfg.y.mean();
    if (p >= 1.0 - kPOneEps) return 0.5 * k + ey;
    const auto m = restricted_max_moments(cfg, k, beta, MomentMode::Censored,
                                          1.0 - p);
    return (m.m2 + p * k * k) / (2.0 * (m.m1 + p * k)) + ey;
}

double eval_aoi_wait_ack(const SystemConfig& cfg, double beta) {
    const auto m =
        restricted_max_moments(cfg, 0.0, beta, MomentMode::Unconditioned, 1.0);
    return m.m2 / (2.0 * m.m1) + cfg.y.mean();
}

std::pair<double, double> eval_rate(const SystemConfig& cfg, double k,
                                    double beta) {
    if (!(k > 0.0)) throw InvalidK("eval_rate requires k > 0");
    const double p = busy_window_prob(cfg, k);
    const double rhs =
        cfg.unconstrained() ? 0.0 : (1.0 + late_ack_prob(cfg, k)) * cfg.inv_fmax;
    if (p >= 1.0 - kPOneEps) return {k, rhs};
    const auto m = restricted_max_moments(cfg, k, beta, MomentMode::Censored,
                                          1.0 - p);
    return {m.m1 + p * k, rhs};
}

std::pair<double, double> eval_rate_wait_ack(const SystemConfig& cfg,
                                             double beta) {
    const auto m =
        restricted_max_moments(cfg, 0.0, beta, MomentMode::Unconditioned, 1.0);
    return {m.m1, cfg.inv_fmax};
}

double solve_beta(const SystemConfig& cfg, double k, const OptimizerConfig& opt) {
    if (!(k > 0.0)) throw InvalidK("solve_beta requires k > 0");
    const auto prob = censored_problem(cfg, k);
    if (prob.p >= 1.0 - kPOneEps)
        throw DegenerateConditioning(
            "solve_beta called in the p = 1 regime; use the periodic formula");
    return solve_fixed_point(prob, opt);
}

double solve_beta_wait_ack(const SystemConfig& cfg, const OptimizerConfig& opt) {
    return solve_fixed_point(wait_ack_problem(cfg), opt);
}

WaitAckOptimum wait_for_ack_optimum(const SystemConfig& cfg,
                                    const OptimizerConfig& opt) {
    const auto prob = wait_ack_problem(cfg);
    const double beta = solve_fixed_point(prob, opt);
    const auto m = prob.moments(beta);
    return {beta, m.q / (2.0 * m.r) + cfg.y.mean()};
}

double periodic_aoi(const SystemConfig& cfg, double k) {
    const auto ys = cfg.y.support_bounds();
    const auto xs = cfg.x.support_bounds();
    if (!(ys.sup < k && k < ys.inf + xs.inf))
        throw OutsideTheorem3Window(
            "periodic_aoi requires sup Y < K < inf Y + inf X");
    return 0.5 * k + cfg.y.mean();
}

std::optional<Theorem3Window> theorem3_window(const SystemConfig& cfg,
                                              double window_epsilon) {
    const auto ys = cfg.y.support_bounds();
    const auto xs = cfg.x.support_bounds();
    const double lo = std::max(ys.sup, cfg.inv_fmax);
    const double hi = ys.inf + xs.inf;
    if (!(lo < hi) || !std::isfinite(lo)) return std::nullopt;
    return Theorem3Window{lo, hi, lo + window_epsilon * (hi - lo)};
}

std::vector<KPoint> k_landscape(const SystemConfig& cfg,
                                const OptimizerConfig& opt,
                                const std::vector<double>& k_values) {
    std::vector<KPoint> out;
    out.reserve(k_values.size());
    for (double k : k_values) {
        if (!(k > 0.0)) throw InvalidK("k_landscape requires k > 0");
        const auto e = evaluate_k(cfg, opt, k);
        out.push_back({e.k, e.beta, e.aoi});
    }
    return out;
}

double sum_survival(const SystemConfig& cfg, double t) {
    const auto ys = cfg.y.support_bounds();
    if (cfg.y.is_constant()) return 1.0 - cfg.x.cdf(t - ys.inf);
    const double hi = std::min(ys.sup, cfg.y.quantile(1.0 - 1e-12));
    const auto xs = cfg.x.support_bounds();
    std::vector<double> breaks = {t - xs.inf};
    if (std::isfinite(xs.sup)) breaks.push_back(t - xs.sup);
    const auto f = [&](double y) {
        return cfg.y.pdf(y) * (1.0 - cfg.x.cdf(t - y));
    };
    return std::clamp(
        integrate_split(f, ys.inf, hi, std::move(breaks), 1e-9), 0.0, 1.0);
}

double sum_quantile(const SystemConfig& cfg, double q) {
    if (!(q > 0.0) || !(q < 1.0))
        throw std::invalid_argument("sum_quantile requires q in (0, 1)");
    const auto ys = cfg.y.support_bounds();
    const auto xs = cfg.x.support_bounds();
    double lo = ys.inf + xs.inf;
    if (cfg.y.is_constant() && cfg.x.is_constant()) return lo;
    const double e = 0.5 * (1.0 - q);
    double hi = cfg.y.quantile(1.0 - e) + cfg.x.quantile(1.0 - e);
    const double tail = 1.0 - q;
    while (hi - lo > 1e-9 * (1.0 + std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (sum_survival(cfg, mid) > tail)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

SearchResult search_k(const SystemConfig& cfg, const OptimizerConfig& opt,
                      SearchMode mode) {
    const double inf_y = cfg.y.support_bounds().inf;
    const double k0 =
        opt.k0 > 0.0 ? opt.k0 : 2.0 * sum_quantile(cfg, 1.0 - 1e-4);
    if (!(k0 > inf_y)) throw InvalidRange("search_k requires k0 > inf Y");

    if (mode == SearchMode::Descent) {
        const double step =
            opt.lambda_step > 0.0 ? opt.lambda_step : (k0 - inf_y) / 400.0;
        const double inf = std::numeric_limits<double>::infinity();
        auto init = evaluate_k(cfg, opt, k0);
        SearchResult best{init.k, init.beta,
                          init.feasible ? init.aoi : inf};
        double k = std::max(inf_y, 1e-12);
        double old = inf;
        double cur = std::numeric_limits<double>::max();
        while (old > cur && k < k0) {
            old = cur;
            const auto e = evaluate_k(cfg, opt, k);
            cur = e.feasible ? e.aoi : inf;
            if (old - cur > 0.0 && cur < best.aoi_star)
                best = {e.k, e.beta, e.aoi};
            k += step;
        }
        return best;
    }

    // Grid mode: uniform grid, densified x10 inside the Theorem 3 window.
    const int n = std::max(opt.k_grid_points, 2);
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + 64);
    const double h = (k0 - inf_y) / (n - 1);
    for (int i = 0; i < n; ++i)
        grid.push_back(std::max(inf_y + i * h, 1e-12));
    if (const auto w = theorem3_window(cfg, opt.window_epsilon)) {
        const double lo = std::max(w->k_lo, inf_y);
        const double hi = std::min(w->k_hi, k0);
        for (double k = lo + 0.1 * h; k < hi; k += 0.1 * h) grid.push_back(k);
        if (w->k_best > inf_y && w->k_best < k0) grid.push_back(w->k_best);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    bool found = false;
    SearchResult best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (double k : grid) {
        const auto e = evaluate_k(cfg, opt, k);
        if (!e.feasible) continue;
        if (e.aoi < best.aoi_star) {
            best = {e.k, e.beta, e.aoi};
            found = true;
        }
    }
    if (!found)
        throw InvalidRange("search_k: no feasible K on the evaluated grid");
    return best;
}

}  // namespace aoi
