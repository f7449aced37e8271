#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace biphasic {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, missing keys, inconsistent boundary conditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or otherwise invalid geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Structurally valid input that violates a mesh invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A mesh query returned no usable result.
class QueryError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// J <= 0 at a quadrature point. Element and point are -1 when unknown.
class InvertedElementError : public Error {
 public:
  InvertedElementError(const std::string& what, int element = -1, int qp = -1)
      : Error(what), element_(element), qp_(qp) {}
  int element() const { return element_; }
  int quadrature_point() const { return qp_; }

 private:
  int element_;
  int qp_;
};

/// Newton did not converge within the iteration budget.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// A time step failed after exhausting all step halvings.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double time, std::vector<std::vector<double>> attempts)
      : Error(what), time_(time), attempts_(std::move(attempts)) {}
  double time() const { return time_; }
  /// Residual history of every attempt, in the order they were made.
  const std::vector<std::vector<double>>& attempts() const { return attempts_; }

 private:
  double time_;
  std::vector<std::vector<double>> attempts_;
};

/// Pressure-oscillation metric requested on a profile where it is undefined.
class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace biphasic
