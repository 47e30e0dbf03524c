#pragma once

#include <stdexcept>
#include <string>

namespace ratebound {

enum class ErrorKind {
  invalid_argument,
  domain,
  numeric,
  bracketing,
  degenerate_portfolio,
  undefined_grade,
  split_degenerate,
  calibration_infeasible,
  empty_input,
  insufficient_outcomes,
  parse,
};

inline const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::invalid_argument: return "invalid argument";
  case ErrorKind::domain: return "domain error";
  case ErrorKind::numeric: return "numeric failure";
  case ErrorKind::bracketing: return "bracketing error";
  case ErrorKind::degenerate_portfolio: return "degenerate portfolio";
  case ErrorKind::undefined_grade: return "undefined grade";
  case ErrorKind::split_degenerate: return "degenerate super-grade split";
  case ErrorKind::calibration_infeasible: return "calibration infeasible";
  case ErrorKind::empty_input: return "empty input";
  case ErrorKind::insufficient_outcomes: return "insufficient outcomes";
  case ErrorKind::parse: return "parse error";
  }
  return "error";
}

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// Raised when quasi-moment matching cannot reach the requested accuracy
// ratio on a finite profile. Carries the attainable supremum.
class CalibrationInfeasible : public Error {
public:
  CalibrationInfeasible(double target_ar, double supremum)
      : Error(ErrorKind::calibration_infeasible,
              "target AR " + std::to_string(target_ar) +
                  " not attainable; supremum is " + std::to_string(supremum)),
        target_ar_(target_ar), supremum_(supremum) {}

  double target_ar() const noexcept { return target_ar_; }
  double supremum() const noexcept { return supremum_; }

private:
  double target_ar_;
  double supremum_;
};

// Raised by super_grade_pds when one side of the split is empty. The
// average PD of the populated side (the portfolio PD) is attached.
class SplitDegenerate : public Error {
public:
  SplitDegenerate(bool risky_empty, double populated_side_pd)
      : Error(ErrorKind::split_degenerate,
              std::string(risky_empty ? "risky" : "safe") +
                  " super-grade is empty; populated side PD is " +
                  std::to_string(populated_side_pd)),
        risky_empty_(risky_empty), populated_side_pd_(populated_side_pd) {}

  bool risky_empty() const noexcept { return risky_empty_; }
  double populated_side_pd() const noexcept { return populated_side_pd_; }

private:
  bool risky_empty_;
  double populated_side_pd_;
};

// Parse failure with 1-based line number (0 when not line-specific).
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string &what)
      : Error(ErrorKind::parse,
              (line ? "line " + std::to_string(line) + ": " : std::string()) +
                  what),
        line_(line), message_(what) {}

  std::size_t line() const noexcept { return line_; }
  const std::string &message() const noexcept { return message_; }

private:
  std::size_t line_;
  std::string message_;
};

} // namespace ratebound
