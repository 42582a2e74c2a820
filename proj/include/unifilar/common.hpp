#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace unifilar {

/// Extended reals are plain doubles; +infinity is the only non-finite value
/// that may appear in rewards or results. NaN is never produced.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Entries below this are structural zeros for positivity classification.
inline constexpr double kZeroThreshold = 1e-15;

inline bool is_infinite(double v) { return v == kInf; }

/// p * log2(p / q) with the conventions 0 log 0/q = 0 and p log p/0 = +inf.
inline double kl_term(double p, double q) {
  if (p <= 0.0) return 0.0;
  if (q <= 0.0) return kInf;
  return p * std::log2(p / q);
}

/// -p log2 p with 0 log 0 = 0.
inline double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

/// Binary entropy in bits.
inline double binary_entropy(double p) {
  return entropy_term(p) + entropy_term(1.0 - p);
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) + " [" + field + "]: " + what),
        line_(line),
        field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

class ImpossibleObservation : public Error {
 public:
  using Error::Error;
};

class InfeasibleConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace unifilar
