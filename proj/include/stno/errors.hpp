#ifndef STNO_ERRORS_HPP
#define STNO_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stno {

// Physics / runtime failures (CLI exit code 1).
struct IndeterminateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnresolvedReferenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FrequencyCollisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepSizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BlowUpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowTooShortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnpairableEventsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LayoutOverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsettledOutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Usage / configuration failures (CLI exit code 2).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnboundVariableError : std::invalid_argument {
    explicit UnboundVariableError(const std::string& var)
        : std::invalid_argument("unbound variable: " + var), variable(var) {}
    std::string variable;
};

struct ParseError : std::invalid_argument {
    ParseError(std::size_t pos, const std::string& what_arg)
        : std::invalid_argument("parse error at position " + std::to_string(pos) + ": " + what_arg),
          position(pos) {}
    std::size_t position;
};

}  // namespace stno

#endif
