#pragma once

#include <stdexcept>
#include <string>

namespace mot {

/// Malformed or inconsistent input data (files, sequences). CLI exit code 1.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration (presets, JSON, degenerate noise). CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mot
