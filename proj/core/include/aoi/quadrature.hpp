#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace aoi {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature on [a, b] to absolute tolerance abs_tol.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol,
                 int max_depth = 40) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol,
                                        max_depth);
}

// Integrate with the interval split at known kink locations so the adaptive
// rule only ever sees smooth pieces.
template <class F>
double integrate_split(const F& f, double a, double b,
                       std::vector<double> breakpoints, double abs_tol,
                       int max_depth = 40) {
    if (!(b > a)) return 0.0;
    std::sort(breakpoints.begin(), breakpoints.end());
    double total = 0.0;
    double prev = a;
    for (double p : breakpoints) {
        if (p <= prev || p >= b) continue;
        total += integrate(f, prev, p, abs_tol, max_depth);
        prev = p;
    }
    total += integrate(f, prev, b, abs_tol, max_depth);
    return total;
}

}  // namespace aoi
