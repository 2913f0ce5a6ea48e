/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every solver module.
 */
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace micropolar {

/// Root of all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two fields (or a field and a grid) disagree on their grid.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// An input field or series carried NaN or infinity.
class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

/// Configuration or hypothesis validation failed. `hypothesis()` names the
/// violated condition, e.g. "c_0+c_d>c_a" or "H1".
class ValidationError : public Error {
 public:
  ValidationError(std::string hypothesis, const std::string& what)
      : Error(hypothesis + ": " + what), hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

/// A density field lost strict positivity, so the weighted Neumann operator
/// is no longer coercive.
class CoercivityError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Failure inside a time step. `time()` is the target time of the step, or
/// NaN when raised outside the time loop.
class StepError : public Error {
 public:
  StepError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class LinearSolverFailure : public StepError {
 public:
  LinearSolverFailure(const std::string& what, double time, double residual)
      : StepError(what, time), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Upwind update would not be a convex combination at cell (i, j).
class CflViolation : public StepError {
 public:
  CflViolation(const std::string& what, int i, int j, double courant,
               double time = std::numeric_limits<double>::quiet_NaN())
      : StepError(what, time), i_(i), j_(j), courant_(courant) {}
  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }
  double courant() const noexcept { return courant_; }

 private:
  int i_;
  int j_;
  double courant_;
};

class InvariantBreach : public StepError {
 public:
  using StepError::StepError;
};

/// |gamma_k(t)| dropped below its threshold; the quotient N_k / gamma_k would
/// be undefined or unstable.
class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, int component, int index,
                  double time, double value, double threshold)
      : Error(what),
        component_(component),
        index_(index),
        time_(time),
        value_(value),
        threshold_(threshold) {}
  int component() const noexcept { return component_; }
  int index() const noexcept { return index_; }
  double time() const noexcept { return time_; }
  double value() const noexcept { return value_; }
  double threshold() const noexcept { return threshold_; }

 private:
  int component_;
  int index_;
  double time_;
  double value_;
  double threshold_;
};

/// Measured data disagree with the initial state at t = 0.
class CompatibilityError : public Error {
 public:
  CompatibilityError(const std::string& what, double residual_u,
                     double residual_w)
      : Error(what), residual_u_(residual_u), residual_w_(residual_w) {}
  double residual_u() const noexcept { return residual_u_; }
  double residual_w() const noexcept { return residual_w_; }

 private:
  double residual_u_;
  double residual_w_;
};

/// Time grids of two series or of a series and a trajectory disagree.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, const std::string& source = {})
      : Error(format(what, line, source)), detail_(what), line_(line) {}
  int line() const noexcept { return line_; }
  /// The message without the location prefix.
  const std::string& detail() const noexcept { return detail_; }
  /// Same error, attributed to the file `path`.
  ParseError in_file(const std::string& path) const {
    return ParseError(detail_, line_, path);
  }

 private:
  static std::string format(const std::string& what, int line,
                            const std::string& source) {
    const std::string at = line > 0 ? std::to_string(line) : std::string();
    if (source.empty()) return at.empty() ? what : "line " + at + ": " + what;
    return source + (at.empty() ? "" : ":" + at) + ": " + what;
  }
  std::string detail_;
  int line_;
};

/// Raised by strict-mode monitors on the first violation.
class MonitorViolation : public Error {
 public:
  MonitorViolation(const std::string& what, int step, std::string monitor)
      : Error(what), step_(step), monitor_(std::move(monitor)) {}
  int step() const noexcept { return step_; }
  const std::string& monitor() const noexcept { return monitor_; }

 private:
  int step_;
  std::string monitor_;
};

}  // namespace micropolar
