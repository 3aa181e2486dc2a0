#pragma once

#include <stdexcept>
#include <string>

namespace rwres {

/// Invalid user-supplied parameters (graph spec, policy, failure plan,
/// experiment config). The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A run could not complete: graph resampling exhausted, warmup cap hit,
/// a bound that never converges within its step cap.
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

class ConnectivityError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class WarmupTimeout : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class CapExceeded : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

}  // namespace rwres
