#pragma once

#include <stdexcept>

namespace cloudcast {

/// Precondition violations: bad shapes, out-of-range parameters, malformed input data.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Filesystem and codec failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cloudcast
