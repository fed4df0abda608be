#pragma once

#include <limits>
#include <utility>
#include <variant>

#include "aoi/random.hpp"

namespace aoi {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// One-dimensional nonnegative delay distribution. Three families cover every
// configuration used in the experiments; anything else can be added as a new
// alternative of the variant.
struct Constant {
    double value;
};

struct Uniform {
    double lo;
    double hi;
};

// shift + Exp(rate)
struct ShiftedExponential {
    double shift;
    double rate;
};

struct SupportBounds {
    double inf;
    double sup;  // may be +infinity
};

class DelayModel {
public:
    using Dist = std::variant<Constant, Uniform, ShiftedExponential>;

    static DelayModel constant(double value);
    static DelayModel uniform(double lo, double hi);
    static DelayModel shifted_exponential(double shift, double rate);

    double sample(RandomStream& rng) const;

    // P(T <= t)
    double cdf(double t) const;

    // Density; must not be called on a Constant model (point mass).
    double pdf(double t) const;

    // (mean, second moment), closed form.
    std::pair<double, double> moments() const;
    double mean() const { return moments().first; }

    SupportBounds support_bounds() const;

    double quantile(double q) const;

    // E[T^j 1{a < T <= b}] for j in {0, 1, 2}; b may be +infinity.
    double partial_moment(int j, double a, double b) const;

    // True for a point mass (Constant, or Uniform with lo == hi).
    bool is_constant() const;

    const Dist& dist() const { return dist_; }

private:
    explicit DelayModel(Dist dist) : dist_(std::move(dist)) {}

    Dist dist_;
};

}  // namespace aoi
