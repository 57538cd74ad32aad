#pragma once

#include <stdexcept>
#include <string>

namespace ridebench {

// Error categories map onto CLI exit codes: config/usage (2), data (3),
// model (4). Everything else is a plain runtime_error.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class ModelError : public std::runtime_error {
public:
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ridebench
