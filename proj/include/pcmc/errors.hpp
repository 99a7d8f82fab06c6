#ifndef PCMC_ERRORS_HPP
#define PCMC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pcmc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Field blow-up; carries the step at which the detector fired.
struct InstabilityError : std::runtime_error {
    InstabilityError(const std::string& msg, long step)
        : std::runtime_error(msg), step(step) {}
    long step;
};

struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pcmc

#endif
