#ifndef QNET_ERRORS_HPP
#define QNET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qnet {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvariantViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHurwitz : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitian : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularResolvent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SampleTooCloseToSpectrum : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotAdmissible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HomotopyDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qnet

#endif
