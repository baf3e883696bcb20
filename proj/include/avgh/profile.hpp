#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avgh/quadrature.hpp"

namespace avgh {

/// Scalar time coefficient c(t) multiplying a fixed perturbation matrix.
struct TimeProfile {
  enum class Kind { constant, sinusoid, piecewise_constant };

  Kind kind = Kind::constant;
  double amplitude = 1.0;
  double frequency = 0.0;  // sinusoid: amplitude * sin(frequency * t + phase)
  double phase = 0.0;
  std::vector<double> breakpoints;  // piecewise: values[i] on [b_{i-1}, b_i)
  std::vector<double> values;
  std::optional<double> cutoff;  // zero for t > cutoff (truncated-after-t0)

  static TimeProfile constant(double amplitude);
  static TimeProfile sinusoid(double amplitude, double frequency, double phase = 0.0);
  static TimeProfile piecewise(std::vector<double> breakpoints, std::vector<double> values);
  TimeProfile truncated(double t0) const;

  double operator()(double t, Side side = Side::center) const;
  bool has_jumps() const { return cutoff.has_value() || kind == Kind::piecewise_constant; }
  bool is_zero() const;
  void validate() const;
};

std::string to_string(TimeProfile::Kind kind);

}  // namespace avgh
