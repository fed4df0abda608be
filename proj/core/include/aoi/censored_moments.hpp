#pragma once

#include "aoi/system_config.hpp"

namespace aoi {

// Scratch quantities of the threshold fixed point for a given (K, beta):
// p = P(Y < K < Y+X), t_rate = (1 + P(Y > K)) / f_max, and the
// Q/R moments with their pK terms included.
struct CycleMoments {
    double p;
    double t_rate;
    double q;
    double r;
};

struct CensoredMoments {
    double r_cond;  // E[max(beta,  X+Y )   | complement of busy window]
    double q_cond;  // E[max(beta^2,(X+Y)^2)| complement of busy window]
};

// p = P(Y < K < Y+X) under independence; closed form where available,
// otherwise adaptive quadrature to 1e-9.
double busy_window_prob(const SystemConfig& cfg, double k);

// P(Y > K)
double late_ack_prob(const SystemConfig& cfg, double k);

// Conditional expectations of max(beta, X+Y) and max(beta^2, (X+Y)^2) on the
// complement of the busy window {Y < K < Y+X}. Throws DegenerateConditioning
// when that complement has probability below 1e-12 (the p = 1 regime).
CensoredMoments censored_conditional_moments(const SystemConfig& cfg, double k,
                                             double beta);

// Unnormalized building block shared with the optimizer.
enum class MomentMode {
    Censored,       // restrict to the complement of {Y < K < Y+X}
    Unconditioned,  // whole space (the wait-for-ACK limit); k is ignored
};

struct RestrictedMaxMoments {
    double m1;  // E[max(beta, X+Y)      ; restriction set]
    double m2;  // E[max(beta^2,(X+Y)^2) ; restriction set]
};

RestrictedMaxMoments restricted_max_moments(const SystemConfig& cfg, double k,
                                            double beta, MomentMode mode,
                                            double set_prob);

}  // namespace aoi
