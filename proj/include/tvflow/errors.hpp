#pragma once

#include <stdexcept>
#include <string>

namespace tvflow {

/// Raised when an argument violates a documented precondition
/// (off-manifold point, mismatched discretizations, bad sizes).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative solver hits its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_error)
      : std::runtime_error(what + " (iterations=" + std::to_string(iterations) +
                           ", last error=" + std::to_string(last_error) + ")"),
        iterations_(iterations),
        last_error_(last_error) {}

  int iterations() const noexcept { return iterations_; }
  double last_error() const noexcept { return last_error_; }

 private:
  int iterations_;
  double last_error_;
};

}  // namespace tvflow
