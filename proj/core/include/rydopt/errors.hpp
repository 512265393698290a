#pragma once

#include <stdexcept>
#include <string>

namespace rydopt {

// Exit-code taxonomy: config -> 2, numeric -> 3, io -> 4.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class UsageError : public ConfigError {
public:
    explicit UsageError(const std::string& msg) : ConfigError(msg) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class PropagationError : public NumericError {
public:
    explicit PropagationError(const std::string& msg) : NumericError(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rydopt
