#include "aoi/delay_model.hpp"

#include <cmath>
#include <stdexcept>

namespace aoi {

DelayModel DelayModel::constant(double value) {
    if (!(value >= 0.0) || !std::isfinite(value))
        throw std::invalid_argument("Constant delay must be finite and >= 0");
    return DelayModel(Constant{value});
}

DelayModel DelayModel::uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi))
        throw std::invalid_argument("Uniform delay requires 0 <= lo <= hi < inf");
    return DelayModel(Uniform{lo, hi});
}

DelayModel DelayModel::shifted_exponential(double shift, double rate) {
    if (!(shift >= 0.0) || !std::isfinite(shift) || !(rate > 0.0))
        throw std::invalid_argument(
            "ShiftedExponential delay requires shift >= 0 and rate > 0");
    return DelayModel(ShiftedExponential{shift, rate});
}

double DelayModel::sample(RandomStream& rng) const {
    return std::visit(
        [&rng](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return d.value;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return d.lo + (d.hi - d.lo) * rng.uniform();
            } else {
                return d.shift - std::log(rng.uniform()) / d.rate;
            }
        },
        dist_);
}

double DelayModel::cdf(double t) const {
    return std::visit(
        [t](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return t >= d.value ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (d.hi == d.lo) return t >= d.lo ? 1.0 : 0.0;
                if (t <= d.lo) return 0.0;
                if (t >= d.hi) return 1.0;
                return (t - d.lo) / (d.hi - d.lo);
            } else {
                if (t <= d.shift) return 0.0;
                return 1.0 - std::exp(-d.rate * (t - d.shift));
            }
        },
        dist_);
}

double DelayModel::pdf(double t) const {
    return std::visit(
        [t](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                throw std::logic_error("pdf() called on a point mass");
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (d.hi == d.lo) throw std::logic_error("pdf() called on a point mass");
                return (t >= d.lo && t <= d.hi) ? 1.0 / (d.hi - d.lo) : 0.0;
            } else {
                if (t < d.shift) return 0.0;
                return d.rate * std::exp(-d.rate * (t - d.shift));
            }
        },
        dist_);
}

std::pair<double, double> DelayModel::moments() const {
    return std::visit(
        [](const auto& d) -> std::pair<double, double> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return {d.value, d.value * d.value};
            } else if constexpr (std::is_same_v<T, Uniform>) {
                const double mean = 0.5 * (d.lo + d.hi);
                const double m2 =
                    (d.lo * d.lo + d.lo * d.hi + d.hi * d.hi) / 3.0;
                return {mean, m2};
            } else {
                const double inv = 1.0 / d.rate;
                const double mean = d.shift + inv;
                const double m2 =
                    d.shift * d.shift + 2.0 * d.shift * inv + 2.0 * inv * inv;
                return {mean, m2};
            }
        },
        dist_);
}

SupportBounds DelayModel::support_bounds() const {
    return std::visit(
        [](const auto& d) -> SupportBounds {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return {d.value, d.value};
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return {d.lo, d.hi};
            } else {
                return {d.shift, kInfiniteTime};
            }
        },
        dist_);
}

double DelayModel::quantile(double q) const {
    if (!(q >= 0.0) || !(q < 1.0))
        return std::visit(
            [q](const auto& d) -> double {
                if (q == 1.0) {
                    (void)d;
                    return kInfiniteTime;
                }
                throw std::invalid_argument("quantile requires q in [0, 1]");
            },
            dist_);
    return std::visit(
        [q](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return d.value;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return d.lo + (d.hi - d.lo) * q;
            } else {
                return d.shift - std::log1p(-q) / d.rate;
            }
        },
        dist_);
}

bool DelayModel::is_constant() const {
    if (std::holds_alternative<Constant>(dist_)) return true;
    if (const auto* u = std::get_if<Uniform>(&dist_)) return u->lo == u->hi;
    return false;
}

namespace {

// E[T^j 1{T > t}] for the shifted exponential (antiderivative of the tail).
double shifted_exp_tail(const ShiftedExponential& d, int j, double t) {
    if (std::isinf(t)) return 0.0;
    const double l = std::max(t, d.shift);
    const double e = std::exp(-d.rate * (l - d.shift));
    const double inv = 1.0 / d.rate;
    switch (j) {
        case 0: return e;
        case 1: return (l + inv) * e;
        default: return (l * l + 2.0 * l * inv + 2.0 * inv * inv) * e;
    }
}

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

}  // namespace

double DelayModel::partial_moment(int j, double a, double b) const {
    if (j < 0 || j > 2) throw std::invalid_argument("partial_moment: j must be 0..2");
    if (!(b > a)) return 0.0;
    return std::visit(
        [j, a, b](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return (a < d.value && d.value <= b) ? ipow(d.value, j) : 0.0;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (d.hi == d.lo)
                    return (a < d.lo && d.lo <= b) ? ipow(d.lo, j) : 0.0;
                const double l = std::max(a, d.lo);
                const double u = std::min(b, d.hi);
                if (u <= l) return 0.0;
                return (ipow(u, j + 1) - ipow(l, j + 1)) /
                       ((j + 1) * (d.hi - d.lo));
            } else {
                const double lo = std::max(a, d.shift);
                if (b <= lo) return 0.0;
                return shifted_exp_tail(d, j, lo) - shifted_exp_tail(d, j, b);
            }
        },
        dist_);
}

}  // namespace aoi
