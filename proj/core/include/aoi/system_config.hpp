#pragma once

#include <stdexcept>

#include "aoi/delay_model.hpp"

namespace aoi {

// Forward service delay Y, ACK delay X, and the sampling-rate bound expressed
// as 1/f_max (0 encodes the unconstrained problem). The constructor enforces
// sup-support(X) <= inf-support(Y), which with independence guarantees
// X <= Y almost surely; boundary equality is allowed.
struct SystemConfig {
    DelayModel y;
    DelayModel x;
    double inv_fmax = 0.0;

    SystemConfig(DelayModel y_model, DelayModel x_model, double inv_fmax_ = 0.0)
        : y(std::move(y_model)), x(std::move(x_model)), inv_fmax(inv_fmax_) {
        if (!(inv_fmax >= 0.0))
            throw std::invalid_argument("inv_fmax must be >= 0");
        if (x.support_bounds().sup > y.support_bounds().inf)
            throw std::invalid_argument(
                "sup-support(X) must not exceed inf-support(Y) "
                "(X <= Y almost surely)");
    }

    bool unconstrained() const { return inv_fmax == 0.0; }
};

}  // namespace aoi
