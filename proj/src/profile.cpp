#include "avgh/profile.hpp"

#include <algorithm>
#include <cmath>

#include "avgh/errors.hpp"

namespace avgh {

TimeProfile TimeProfile::constant(double amplitude) {
  TimeProfile p;
  p.amplitude = amplitude;
  return p;
}

TimeProfile TimeProfile::sinusoid(double amplitude, double frequency, double phase) {
  TimeProfile p;
  p.kind = Kind::sinusoid;
  p.amplitude = amplitude;
  p.frequency = frequency;
  p.phase = phase;
  return p;
}

TimeProfile TimeProfile::piecewise(std::vector<double> breakpoints, std::vector<double> values) {
  TimeProfile p;
  p.kind = Kind::piecewise_constant;
  p.breakpoints = std::move(breakpoints);
  p.values = std::move(values);
  p.validate();
  return p;
}

TimeProfile TimeProfile::truncated(double t0) const {
  TimeProfile p = *this;
  p.cutoff = t0;
  return p;
}

namespace {

// Grid nodes computed as tau * j / n may miss a jump time by a few ulps.
bool near(double t, double b) { return std::abs(t - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

double TimeProfile::operator()(double t, Side side) const {
  if (cutoff) {
    if (near(t, *cutoff)) {
      if (side == Side::right) return 0.0;
      t = *cutoff;
    } else if (t > *cutoff) {
      return 0.0;
    }
  }
  for (double b : breakpoints)
    if (near(t, b)) t = b;
  switch (kind) {
    case Kind::constant: return amplitude;
    case Kind::sinusoid: return amplitude * std::sin(frequency * t + phase);
    case Kind::piecewise_constant: {
      // index of the piece containing t; at a breakpoint the left limit
      // belongs to the previous piece
      auto it = side == Side::left
                    ? std::lower_bound(breakpoints.begin(), breakpoints.end(), t)
                    : std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
      return amplitude * values[static_cast<std::size_t>(it - breakpoints.begin())];
    }
  }
  return 0.0;
}

bool TimeProfile::is_zero() const {
  if (amplitude == 0.0) return true;
  if (kind == Kind::piecewise_constant)
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
  return false;
}

void TimeProfile::validate() const {
  if (!std::isfinite(amplitude) || !std::isfinite(frequency) || !std::isfinite(phase))
    throw ValidationError("time profile: non-finite parameter");
  if (kind == Kind::piecewise_constant) {
    if (values.size() != breakpoints.size() + 1)
      throw ValidationError("time profile: piecewise profile needs one more value than breakpoints");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
      throw ValidationError("time profile: breakpoints must be ascending");
  }
}

std::string to_string(TimeProfile::Kind kind) {
  switch (kind) {
    case TimeProfile::Kind::constant: return "constant";
    case TimeProfile::Kind::sinusoid: return "sinusoid";
    case TimeProfile::Kind::piecewise_constant: return "piecewise";
  }
  return "?";
}

}  // namespace avgh
