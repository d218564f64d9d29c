#pragma once

#include <stdexcept>
#include <string>

namespace levelsp {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A probability mass vector is malformed (negative entry, bad sum, ...).
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

/// A cumulative vector is malformed (decreasing, does not end at 1, ...).
class InvalidCdf : public Error {
 public:
  using Error::Error;
};

/// Scale construction failed (empty, duplicate labels).
class InvalidScale : public Error {
 public:
  using Error::Error;
};

/// Two distributions on different scales were combined.
class ScaleMismatch : public Error {
 public:
  using Error::Error;
};

/// A weight vector is unusable (negative entries, all zero, bad denominator).
class InvalidWeights : public Error {
 public:
  using Error::Error;
};

/// A grading curve violates its monotonicity or boundary requirements.
class InvalidCurve : public Error {
 public:
  using Error::Error;
};

/// A profile does not match the aggregator (length, scale, missing data).
class ProfileError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A profile passed to the dominated-profile fast path is not a chain.
class NotDominated : public Error {
 public:
  using Error::Error;
};

/// A method descriptor or tool option could not be interpreted.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive audit would exceed its evaluation budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// The hypotheses of a conditional check are not satisfied by the instance.
class PreconditionUnmet : public Error {
 public:
  using Error::Error;
};

/// Internal consistency assertion failed; indicates a bug, never user input.
class TransitivityViolation : public Error {
 public:
  using Error::Error;
};

/// Exact arithmetic left the representable 64-bit fraction range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Structured input (JSON ballot/phantom/report files) failed to parse.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace levelsp
