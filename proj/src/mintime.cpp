#include "avgh/mintime.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "avgh/errors.hpp"
#include "avgh/optimize.hpp"
#include "avgh/quadrature.hpp"
#include "avgh/report.hpp"

namespace avgh {

using std::numbers::pi;

std::string TimeValue::to_string() const { return feasible ? format_number(value) : "infeasible (" + reason + ")"; }

namespace {

void require_positive(double v, const char* name, const char* op) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(std::string(op) + ": " + name + " must be positive and finite");
}

void require_nonnegative(double v, const char* name, const char* op) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw ValidationError(std::string(op) + ": " + name + " must be nonnegative and finite");
}

}  // namespace

TimeValue tau_star(double M, double L) {
  require_positive(M, "M", "tau_star");
  require_nonnegative(L, "L", "tau_star");
  const double d = 1.0 - 2.0 * L * L * M * M;
  if (!(d > 0.0)) return TimeValue::infeasible("L >= 1/(sqrt(2) M)");
  return TimeValue::of(2.0 * pi * M / std::sqrt(d));
}

TimeValue tau_star_r(double M, double L, double r) {
  require_positive(M, "M", "tau_star_r");
  require_nonnegative(L, "L", "tau_star_r");
  require_positive(r, "r", "tau_star_r");
  const double d = 1.0 - M * M * (1.0 + r) * L * L;
  if (!(d > 0.0)) return TimeValue::infeasible("L >= 1/(M sqrt(1 + r))");
  return TimeValue::of(pi * M * std::sqrt(1.0 + 1.0 / r) / std::sqrt(d));
}

OptimalR optimal_r(double M, double L) {
  require_positive(M, "M", "optimal_r");
  require_nonnegative(L, "L", "optimal_r");
  OptimalR out;
  if (L == 0.0) {
    out.feasible = true;
    out.r_infinite = true;
    out.r = std::numeric_limits<double>::infinity();
    out.tau_min = pi * M;
    return out;
  }
  if (!(L * M < 1.0)) return out;
  const double log_r_max = std::log(1.0 / (L * L * M * M) - 1.0);
  auto cost = [&](double u) {
    const TimeValue t = tau_star_r(M, L, std::exp(u));
    return t.feasible ? t.value : std::numeric_limits<double>::infinity();
  };
  const double u = golden_min(cost, log_r_max - 60.0, log_r_max);
  out.feasible = true;
  out.r = std::exp(u);
  out.tau_min = cost(u);
  return out;
}

TestFunction TestFunction::sine(double tau) {
  return {[tau](double t) { return std::sin(pi * t / tau); },
          [tau](double t) { return pi / tau * std::cos(pi * t / tau); }};
}

namespace {

void check_boundary(const TestFunction& phi, double tau) {
  const double a = std::abs(phi.phi(0.0));
  const double b = std::abs(phi.phi(tau));
  if (a > 1e-10 || b > 1e-10)
    throw BoundaryViolation("test function must vanish at 0 and tau (|phi(0)| = " + format_number(a) +
                            ", |phi(tau)| = " + format_number(b) + ")");
}

}  // namespace

double kappa_phi(const TestFunction& phi, double M, double L, double tau) {
  require_positive(tau, "tau", "kappa_phi");
  check_boundary(phi, tau);
  const double mass = integrate([&](double t) { return phi.phi(t) * phi.phi(t); }, 0.0, tau);
  const double stiff = integrate([&](double t) { return phi.dphi(t) * phi.dphi(t); }, 0.0, tau);
  return (1.0 - 2.0 * L * L * M * M) * mass - 2.0 * M * M * stiff;
}

double kappa_sine(double M, double L, double tau) {
  return (1.0 - 2.0 * L * L * M * M) * tau / 2.0 - pi * pi * M * M / tau;
}

double kappa_growth(const TestFunction& phi, double M, double L, const GrowthBounds& g, double tau) {
  require_positive(tau, "tau", "kappa_growth");
  check_boundary(phi, tau);
  const double c = 2.0 * g.K * g.K * M * M;
  const double mass = integrate(
      [&](double t) {
        const double p = phi.phi(t);
        return p * p * (g.k * g.k * std::exp(2.0 * g.alpha * t) - c * L * L * std::exp(2.0 * g.beta * t));
      },
      0.0, tau);
  const double stiff = integrate(
      [&](double t) {
        const double d = phi.dphi(t);
        return d * d * std::exp(2.0 * g.beta * t);
      },
      0.0, tau);
  return mass - c * stiff;
}

namespace {

double gauss_integral(const Weight& f, double a, double b) {
  if (b <= a) return 0.0;
  const GaussRule& rule = gauss_legendre(10);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) acc += rule.weights[q] * f(mid + half * rule.nodes[q]);
  return half * acc;
}

// Cumulative integrals of a weight on a uniform grid with exact partial cells.
class Cumulative {
 public:
  Cumulative(Weight f, double tau, std::size_t n) : f_(std::move(f)), h_(tau / static_cast<double>(n)), c_(n + 1, 0.0) {
    for (std::size_t i = 0; i < n; ++i) c_[i + 1] = c_[i] + gauss_integral(f_, node(i), node(i + 1));
  }
  double node(std::size_t i) const { return h_ * static_cast<double>(i); }
  double at(std::size_t i) const { return c_[i]; }
  double total() const { return c_.back(); }
  double operator()(double x) const {
    const std::size_t n = c_.size() - 1;
    if (x <= 0.0) return 0.0;
    std::size_t i = std::min(n - 1, static_cast<std::size_t>(x / h_));
    return c_[i] + (x >= node(i) ? gauss_integral(f_, node(i), x) : -gauss_integral(f_, x, node(i)));
  }

 private:
  Weight f_;
  double h_;
  std::vector<double> c_;
};

}  // namespace

HardyResult hardy_B(const Weight& w, const Weight& v, double tau, std::size_t resolution) {
  require_positive(tau, "tau", "hardy_B");
  const std::size_t n = std::max<std::size_t>(4, resolution);
  const double h = tau / static_cast<double>(n);
  const GaussRule& rule = gauss_legendre(10);
  double w_scale = 0.0;
  for (std::size_t i = 0; i <= n; ++i) w_scale = std::max(w_scale, std::abs(w(h * static_cast<double>(i))));
  auto check = [&](double t) {
    const double wt = w(t), vt = v(t);
    if (!std::isfinite(wt) || wt < -1e-14 * std::max(1.0, w_scale))
      throw NegativeWeight("hardy_B: w(" + format_number(t) + ") = " + format_number(wt) + " is negative");
    if (!std::isfinite(vt) || !(vt > 0.0))
      throw NegativeWeight("hardy_B: v(" + format_number(t) + ") = " + format_number(vt) + " is not positive");
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double a = h * static_cast<double>(i);
    check(a);
    for (double xq : rule.nodes) check(a + 0.5 * h * (xq + 1.0));
  }
  check(tau);

  const Cumulative W(w, tau, n);
  const Cumulative V([&v](double t) { return 1.0 / v(t); }, tau, n);
  const double v_total = V.total();

  HardyResult out;
  double best = -1.0;
  std::size_t bi = 1, bj = 1;
  for (std::size_t i = 1; i < n; ++i) {
    const double vi = V.at(i);
    for (std::size_t j = i; j < n; ++j) {
      const double val = (W.at(j) - W.at(i)) * std::min(vi, v_total - V.at(j));
      if (val > best) {
        best = val;
        bi = i;
        bj = j;
      }
    }
  }
  out.B = std::max(0.0, best);
  out.x = W.node(bi);
  out.y = W.node(bj);

  auto neg = [&](double x, double y) {
    if (x <= 0.0 || y >= tau || x > y) return 0.0;
    return -(W(y) - W(x)) * std::min(V(x), v_total - V(y));
  };
  if (out.B > 0.0) {
    const Point2 p = nelder_mead_2d(neg, out.x, out.y, 0.5 * h);
    if (-p.value > out.B) {
      out.B = -p.value;
      out.x = p.x;
      out.y = p.y;
    }
  }
  out.sqrt_B = std::sqrt(out.B);
  return out;
}

double WeightW::operator()(double t) const {
  return k * k / (2.0 * K * K * M * M) * std::exp(-2.0 * omega * t) - L * L;
}

bool WeightW::positive_on(double tau) const { return L < k / (std::sqrt(2.0) * K * M * std::exp(omega * tau)); }

WeightW weight_w(double k, double K, double M, double L, double omega) {
  require_positive(k, "k", "weight_w");
  require_positive(K, "K", "weight_w");
  require_positive(M, "M", "weight_w");
  require_nonnegative(L, "L", "weight_w");
  require_nonnegative(omega, "omega", "weight_w");
  return {k, K, M, L, omega};
}

double f_value(const WeightW& w, double tau, double x, double y) {
  if (x < 0.0 || y > tau || x > y) return 0.0;
  const double d = y - x;
  const double c = w.k * w.k / (2.0 * w.K * w.K * w.M * w.M);
  double first = w.omega == 0.0 ? c * d
                                : c * std::exp(-2.0 * w.omega * x) * (-std::expm1(-2.0 * w.omega * d)) / (2.0 * w.omega);
  first -= w.L * w.L * d;
  return first * std::min(x, tau - y);
}

FCriterion f_criterion(double k, double K, double M, double L, double omega, double tau, std::size_t grid) {
  require_positive(tau, "tau", "f_criterion");
  const WeightW w = weight_w(k, K, M, L, omega);
  const std::size_t n = std::max<std::size_t>(4, grid);
  const double h = tau / static_cast<double>(n);
  FCriterion out;
  out.f_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = i; j <= n; ++j) {
      const double x = h * static_cast<double>(i);
      const double y = j == n ? tau : h * static_cast<double>(j);
      const double f = f_value(w, tau, x, y);
      if (f > out.f_max) {
        out.f_max = f;
        out.x = x;
        out.y = y;
      }
    }
  }
  const Point2 p = nelder_mead_2d([&](double x, double y) { return -f_value(w, tau, x, y); }, out.x, out.y, 0.5 * h);
  if (-p.value > out.f_max) {
    out.f_max = -p.value;
    out.x = p.x;
    out.y = p.y;
  }
  out.satisfied = out.f_max > 2.0;
  out.f_quarter = f_value(w, tau, 0.25 * tau, 0.75 * tau);
  out.quarter_satisfied = out.f_quarter > 2.0;
  return out;
}

TimeValue tau_double_star(double k, double K, double M, double L, double omega) {
  require_positive(k, "k", "tau_double_star");
  require_positive(K, "K", "tau_double_star");
  require_positive(M, "M", "tau_double_star");
  require_nonnegative(L, "L", "tau_double_star");
  if (!(L < k / (2.0 * std::sqrt(2.0) * K * M)))
    return TimeValue::infeasible("Lipschitz hypothesis L < k/(2 sqrt(2) K M) fails");
  if (!(omega >= 0.0 && omega <= k / (16.0 * K * M)))
    return TimeValue::infeasible("growth-gap hypothesis 0 <= beta - alpha <= k/(16 K M) fails");
  return TimeValue::of(8.0 * std::sqrt(2.0) * K * M / k);
}

double BestTest::operator()(double t, double tau) const {
  double acc = 0.0;
  for (Index j = 0; j < coefficients.size(); ++j) acc += coefficients(j) * std::sin(static_cast<double>(j + 1) * pi * t / tau);
  return acc;
}

double BestTest::derivative(double t, double tau) const {
  double acc = 0.0;
  for (Index j = 0; j < coefficients.size(); ++j) {
    const double f = static_cast<double>(j + 1) * pi / tau;
    acc += coefficients(j) * f * std::cos(f * t);
  }
  return acc;
}

BestTest best_test_function(const Weight& w, double tau, std::size_t basis_size) {
  require_positive(tau, "tau", "best_test_function");
  if (basis_size < 1) throw ValidationError("best_test_function: basis_size must be at least 1");
  const Index n = static_cast<Index>(basis_size);
  const std::size_t panels = 4 * basis_size + 16;
  const GaussRule& rule = gauss_legendre(10);
  const double h = tau / static_cast<double>(panels);

  RMat mass = RMat::Zero(n, n);
  RVec s(n);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = h * (static_cast<double>(p) + 0.5);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = mid + 0.5 * h * rule.nodes[q];
      const double wq = 0.5 * h * rule.weights[q] * w(t);
      for (Index j = 0; j < n; ++j) s(j) = std::sin(static_cast<double>(j + 1) * pi * t / tau);
      mass.noalias() += wq * s * s.transpose();
    }
  }
  RMat stiff = RMat::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double f = static_cast<double>(j + 1) * pi / tau;
    stiff(j, j) = f * f * tau / 2.0;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<RMat> es(0.5 * (mass + mass.transpose()), stiff);
  if (es.info() != Eigen::Success) throw NumericalError("best_test_function", "generalized eigensolver failed");

  BestTest out;
  out.rayleigh = es.eigenvalues()(n - 1);
  out.coefficients = es.eigenvectors().col(n - 1);
  // scale to sup norm 1 with a positive peak
  double peak = 0.0;
  std::size_t at = 0;
  const std::size_t samples = 64 * basis_size + 1;
  const double dt = tau / static_cast<double>(samples);
  for (std::size_t i = 0; i <= samples; ++i) {
    const double v = out(dt * static_cast<double>(i), tau);
    if (std::abs(v) > std::abs(peak)) {
      peak = v;
      at = i;
    }
  }
  double lo = std::max(0.0, dt * (static_cast<double>(at) - 1.0)), hi = std::min(tau, dt * (static_cast<double>(at) + 1.0));
  for (int it = 0; it < 100; ++it) {
    const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    if (std::abs(out(a, tau)) < std::abs(out(b, tau))) lo = a;
    else hi = b;
  }
  if (const double v = out(0.5 * (lo + hi), tau); std::abs(v) > std::abs(peak)) peak = v;
  if (peak != 0.0) out.coefficients /= peak;
  const double num = out.coefficients.dot(mass * out.coefficients);
  const double den = out.coefficients.dot(stiff * out.coefficients);
  out.kappa = num - den;
  return out;
}

MinimalTimeReport minimal_time_report(const MintimeInput& in) {
  MinimalTimeReport r;
  r.input = in;
  r.tau_star = tau_star(in.M, in.L);
  r.tau_star_r = optimal_r(in.M, in.L);
  r.tau_double_star = tau_double_star(in.k, in.K, in.M, in.L, in.omega);
  if (in.tau > 0.0) r.tau = in.tau;
  else if (r.tau_double_star.feasible) r.tau = 1.05 * r.tau_double_star.value;
  else if (r.tau_star.feasible) r.tau = 1.05 * r.tau_star.value;
  else r.tau = 2.0 * pi * in.M;

  r.kappa_phi = kappa_phi(TestFunction::sine(r.tau), in.M, in.L, r.tau);
  const WeightW w = weight_w(in.k, in.K, in.M, in.L, in.omega);
  r.weight_positive = w.positive_on(r.tau);
  if (r.weight_positive) {
    r.hardy = hardy_B(w, [](double) { return 1.0; }, r.tau, in.hardy_resolution);
    r.hardy_available = true;
  }
  r.f = f_criterion(in.k, in.K, in.M, in.L, in.omega, r.tau);
  r.best = best_test_function(w, r.tau, in.basis_size);
  return r;
}

void write_report(std::ostream& os, const MinimalTimeReport& r) {
  const auto& in = r.input;
  os << "M = " << format_number(in.M) << "\nL = " << format_number(in.L) << "\nk = " << format_number(in.k)
     << "\nK = " << format_number(in.K) << "\nomega = " << format_number(in.omega) << "\n";
  os << "tau = " << format_number(r.tau) << "\n";
  os << "tau_star = " << r.tau_star.to_string() << "\n";
  if (r.tau_star_r.feasible)
    os << "optimal_r r = " << (r.tau_star_r.r_infinite ? "infinite" : format_number(r.tau_star_r.r))
       << " tau_min = " << format_number(r.tau_star_r.tau_min) << "\n";
  else
    os << "optimal_r = infeasible (L M >= 1)\n";
  os << "kappa_phi(sine) = " << format_number(r.kappa_phi) << "\n";
  os << "tau_double_star = " << r.tau_double_star.to_string() << "\n";
  os << "weight_positive = " << (r.weight_positive ? "true" : "false") << "\n";
  if (r.hardy_available)
    os << "hardy_B = " << format_number(r.hardy.B) << " sqrt_B = " << format_number(r.hardy.sqrt_B)
       << " at x = " << format_number(r.hardy.x) << " y = " << format_number(r.hardy.y)
       << " exceeds_sqrt2 = " << (r.hardy.sqrt_B > std::sqrt(2.0) ? "true" : "false") << "\n";
  else
    os << "hardy_B = unavailable (weight not positive on [0, tau])\n";
  os << "f_max = " << format_number(r.f.f_max) << " at x = " << format_number(r.f.x) << " y = " << format_number(r.f.y)
     << " satisfied = " << (r.f.satisfied ? "true" : "false") << "\n";
  os << "f_quarter = " << format_number(r.f.f_quarter) << " satisfied = " << (r.f.quarter_satisfied ? "true" : "false")
     << "\n";
  os << "best_test rayleigh = " << format_number(r.best.rayleigh) << " kappa = " << format_number(r.best.kappa) << "\n";
}

void write_sweep_header(std::ostream& os) {
  os << "M,L,omega,k,K,tau_star,tau_star_opt,tau_double_star,hardy_B,f_max,satisfied\n";
}

void write_sweep_row(std::ostream& os, const MinimalTimeReport& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto& in = r.input;
  os << format_number(in.M) << ',' << format_number(in.L) << ',' << format_number(in.omega) << ','
     << format_number(in.k) << ',' << format_number(in.K) << ','
     << format_number(r.tau_star.feasible ? r.tau_star.value : nan) << ','
     << format_number(r.tau_star_r.feasible ? r.tau_star_r.tau_min : nan) << ','
     << format_number(r.tau_double_star.feasible ? r.tau_double_star.value : nan) << ','
     << format_number(r.hardy_available ? r.hardy.B : nan) << ',' << format_number(r.f.f_max) << ','
     << (r.f.satisfied ? 1 : 0) << '\n';
}

}  // namespace avgh
