#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

// Raised when P(complement of the busy window) is numerically zero, i.e.
// the p = 1 regime where the state-2 conditional moments do not exist.
// Callers must switch to the periodic (p = 1) formula instead.
struct DegenerateConditioning : std::runtime_error {
    explicit DegenerateConditioning(const std::string& what)
        : std::runtime_error(what) {}
};

// The bisection bracket for the threshold fixed point could not be grown
// to contain a sign change.
struct BracketFailure : std::runtime_error {
    explicit BracketFailure(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidK : std::invalid_argument {
    explicit InvalidK(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidRange : std::invalid_argument {
    explicit InvalidRange(const std::string& what) : std::invalid_argument(what) {}
};

// The requested period lies outside the open interval where the periodic
// closed form is valid.
struct OutsideTheorem3Window : std::domain_error {
    explicit OutsideTheorem3Window(const std::string& what)
        : std::domain_error(what) {}
};

// Safety cap on simulator events was reached (runaway configuration).
struct EventCapExceeded : std::runtime_error {
    explicit EventCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aoi
