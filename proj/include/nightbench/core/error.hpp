#pragma once

#include <stdexcept>
#include <string>

namespace nightbench {

/// Raised when an argument or data object violates a documented precondition
/// or invariant.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised on filesystem or decode/encode failures. The message names the file.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nightbench
