#pragma once

#include <stdexcept>
#include <string>

namespace crowdmarket {

/// Error classes surfaced to the CLI as distinct exit codes.
enum class ErrorCategory { kParse = 2, kInvariant = 3, kSolver = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

/// Malformed input documents (syntax, missing keys, wrong JSON types).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorCategory::kParse, what) {}
};

/// Domain invariant violations: bad coefficients, asymmetric ties,
/// index out of range, length mismatches.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what)
      : Error(ErrorCategory::kInvariant, what) {}
};

/// Numerical failures: singular systems, violated solver preconditions.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what)
      : Error(ErrorCategory::kSolver, what) {}
};

}  // namespace crowdmarket
