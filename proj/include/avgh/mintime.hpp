#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "avgh/system.hpp"
#include "avgh/types.hpp"

namespace avgh {

/// A time value or the reason it does not exist.
struct TimeValue {
  bool feasible = false;
  double value = 0.0;
  std::string reason;

  static TimeValue of(double v) { return {true, v, {}}; }
  static TimeValue infeasible(std::string why) { return {false, 0.0, std::move(why)}; }
  std::string to_string() const;
};

/// 2 pi M / sqrt(1 - 2 L^2 M^2), feasible when L < 1/(sqrt(2) M).
TimeValue tau_star(double M, double L);

/// pi M sqrt(1 + 1/r) / sqrt(1 - M^2 (1 + r) L^2), feasible when L < 1/(M sqrt(1 + r)).
TimeValue tau_star_r(double M, double L, double r);

struct OptimalR {
  bool feasible = false;
  bool r_infinite = false;  // L = 0: the infimum pi M is approached as r grows
  double r = 0.0;
  double tau_min = 0.0;
};
OptimalR optimal_r(double M, double L);

struct TestFunction {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;

  static TestFunction sine(double tau);
};

/// (1 - 2 L^2 M^2) int phi^2 - 2 M^2 int phi'^2. BoundaryViolation unless phi(0) = phi(tau) = 0.
double kappa_phi(const TestFunction& phi, double M, double L, double tau);
/// Closed form of kappa_phi for sin(pi t / tau).
double kappa_sine(double M, double L, double tau);
/// int phi^2 (k^2 e^{2 alpha t} - 2 K^2 M^2 L^2 e^{2 beta t}) - 2 K^2 M^2 int phi'^2 e^{2 beta t};
/// equals kappa_phi for k = K = 1, alpha = beta = 0.
double kappa_growth(const TestFunction& phi, double M, double L, const GrowthBounds& g, double tau);

using Weight = std::function<double(double)>;

struct HardyResult {
  double B = 0.0;       // the displayed supremum
  double sqrt_B = 0.0;  // square-root normalisation, compared against sqrt(2)
  double x = 0.0;
  double y = 0.0;
};

/// sup over 0 < x <= y < tau of (int_x^y w) min(int_0^x 1/v, int_y^tau 1/v): grid
/// of the given resolution then one local refinement from the grid maximiser.
HardyResult hardy_B(const Weight& w, const Weight& v, double tau, std::size_t resolution = 400);

/// w(t) = k^2/(2 K^2 M^2) e^{-2 omega t} - L^2.
struct WeightW {
  double k = 1.0, K = 1.0, M = 1.0, L = 0.0, omega = 0.0;

  double operator()(double t) const;
  /// Strict positivity on [0, tau]: L < k / (sqrt(2) K M e^{omega tau}).
  bool positive_on(double tau) const;
};
WeightW weight_w(double k, double K, double M, double L, double omega);

/// f(x, y) = (int_x^y w) min(x, tau - y); the omega = 0 case uses the analytic limit.
double f_value(const WeightW& w, double tau, double x, double y);

struct FCriterion {
  double f_max = 0.0;
  double x = 0.0;
  double y = 0.0;
  bool satisfied = false;  // f_max > 2
  double f_quarter = 0.0;  // f(tau/4, 3 tau/4)
  bool quarter_satisfied = false;
};
FCriterion f_criterion(double k, double K, double M, double L, double omega, double tau, std::size_t grid = 200);

/// 8 sqrt(2) K M / k when L < k/(2 sqrt(2) K M) and 0 <= omega <= k/(16 K M).
TimeValue tau_double_star(double k, double K, double M, double L, double omega);

struct BestTest {
  RVec coefficients;  // in the basis sin(j pi t / tau), j = 1..n, sup norm 1
  double rayleigh = 0.0;
  double kappa = 0.0;  // int w phi^2 - int phi'^2 for the returned phi
  double operator()(double t, double tau) const;
  double derivative(double t, double tau) const;
};
/// Maximises int w phi^2 / int phi'^2 over the sine span.
BestTest best_test_function(const Weight& w, double tau, std::size_t basis_size = 64);

struct MintimeInput {
  double M = 1.0;
  double L = 0.0;
  double k = 1.0;
  double K = 1.0;
  double omega = 0.0;
  double tau = 0.0;  // 0: use 1.05 tau** when feasible, else 1.05 tau*, else 2 pi M
  std::size_t hardy_resolution = 400;
  std::size_t basis_size = 64;
};

struct MinimalTimeReport {
  MintimeInput input;
  double tau = 0.0;
  TimeValue tau_star;
  OptimalR tau_star_r;
  double kappa_phi = 0.0;
  TimeValue tau_double_star;
  bool weight_positive = false;
  bool hardy_available = false;
  HardyResult hardy;
  FCriterion f;
  BestTest best;
};

MinimalTimeReport minimal_time_report(const MintimeInput& in);

void write_report(std::ostream& os, const MinimalTimeReport& r);
void write_sweep_header(std::ostream& os);
void write_sweep_row(std::ostream& os, const MinimalTimeReport& r);

}  // namespace avgh
