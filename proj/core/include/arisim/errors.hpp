#pragma once

#include <stdexcept>
#include <string>

namespace arisim {

// Process exit categories used by the CLI: 0 success, 2 configuration or
// validation failure, 3 solver/numeric failure, 4 I/O failure.
enum class ErrorCategory : int { config = 2, solver = 3, io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what)
      : Error(ErrorCategory::solver, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace arisim
