#pragma once

#include <stdexcept>
#include <string>

namespace dlms {

/// Bad user input: malformed config, invalid parameter, unusable CLI request.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: divergence, unstable recursion, singular system.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure: unreadable input, unwritable output.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dlms
