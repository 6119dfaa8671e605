#pragma once

#include <stdexcept>
#include <string>

namespace trajmap {

// Bad configuration or bad arguments: exit code 1 at the CLI.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unreadable input data: exit code 2 at the CLI.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training diverged (non-finite loss): exit code 3 at the CLI.
struct TrainError : std::runtime_error {
  explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace trajmap
