#include "avgh/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "avgh/errors.hpp"
#include "avgh/evolution.hpp"
#include "avgh/optimize.hpp"
#include "avgh/linalg.hpp"
#include "avgh/parallel.hpp"

namespace avgh {

TimeGrid::TimeGrid(double tau, std::size_t n_steps) : tau_(tau), n_steps_(n_steps) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive and finite");
  if (n_steps == 0) throw ValidationError("n_steps must be positive");
}

// --- MatrixFamily ---------------------------------------------------------

MatrixFamily MatrixFamily::constant(Mat m) {
  MatrixFamily f;
  f.kind_ = Kind::constant;
  f.base_ = std::move(m);
  return f;
}

MatrixFamily MatrixFamily::perturbed(Mat base, std::vector<PerturbationTerm> terms) {
  for (const auto& term : terms) {
    if (term.matrix.rows() != base.rows() || term.matrix.cols() != base.cols())
      throw ValidationError("perturbation term shape differs from the base matrix");
    term.profile.validate();
  }
  MatrixFamily f;
  f.kind_ = terms.empty() ? Kind::constant : Kind::base_plus_perturbation;
  f.base_ = std::move(base);
  f.terms_ = std::move(terms);
  return f;
}

MatrixFamily MatrixFamily::sampled(std::vector<double> times, std::vector<Mat> samples) {
  if (times.empty() || times.size() != samples.size())
    throw ValidationError("sampled family needs one matrix per sample time");
  if (!std::is_sorted(times.begin(), times.end()) ||
      std::adjacent_find(times.begin(), times.end()) != times.end())
    throw ValidationError("sample times must be strictly increasing");
  for (const auto& s : samples)
    if (s.rows() != samples[0].rows() || s.cols() != samples[0].cols())
      throw ValidationError("sampled family matrices differ in shape");
  MatrixFamily f;
  f.kind_ = Kind::sampled;
  f.base_ = samples[0];
  f.times_ = std::move(times);
  f.samples_ = std::move(samples);
  return f;
}

Mat MatrixFamily::operator()(double t, Side side) const {
  switch (kind_) {
    case Kind::constant: return base_;
    case Kind::base_plus_perturbation: {
      Mat out = base_;
      for (const auto& term : terms_) {
        const double c = term.profile(t, side);
        if (c != 0.0) out += c * term.matrix;
      }
      return out;
    }
    case Kind::sampled: {
      if (t <= times_.front()) return samples_.front();
      if (t >= times_.back()) return samples_.back();
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
      const std::size_t lo = hi - 1;
      const double theta = (t - times_[lo]) / (times_[hi] - times_[lo]);
      return (1.0 - theta) * samples_[lo] + theta * samples_[hi];
    }
  }
  return base_;
}

MatrixFamily MatrixFamily::perturbation() const {
  if (kind_ != Kind::base_plus_perturbation) return constant(Mat::Zero(rows(), cols()));
  return perturbed(Mat::Zero(rows(), cols()), terms_);
}

MatrixFamily MatrixFamily::scaled(cplx factor) const {
  MatrixFamily f = *this;
  f.base_ *= factor;
  for (auto& term : f.terms_) term.matrix *= factor;
  for (auto& s : f.samples_) s *= factor;
  return f;
}

MatrixFamily MatrixFamily::with_perturbation_scaled(double factor) const {
  MatrixFamily f = *this;
  for (auto& term : f.terms_) term.matrix *= factor;
  return f;
}

bool MatrixFamily::has_jumps() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const PerturbationTerm& t) { return t.profile.has_jumps(); });
}

bool MatrixFamily::is_real() const {
  auto real = [](const Mat& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; };
  if (base_.size() > 0 && !real(base_)) return false;
  for (const auto& t : terms_)
    if (!real(t.matrix)) return false;
  for (const auto& s : samples_)
    if (!real(s)) return false;
  return true;
}

std::string to_string(MatrixFamily::Kind kind) {
  switch (kind) {
    case MatrixFamily::Kind::constant: return "constant";
    case MatrixFamily::Kind::base_plus_perturbation: return "perturbed";
    case MatrixFamily::Kind::sampled: return "sampled";
  }
  return "?";
}

// --- constants ------------------------------------------------------------

double GrowthBounds::lower(double dt) const { return k * std::exp(alpha * dt); }
double GrowthBounds::upper(double dt) const { return K * std::exp(beta * dt); }

void GrowthBounds::validate() const {
  if (!(k > 0.0) || !(k <= K)) throw ValidationError("growth constants need 0 < k <= K");
  if (!(alpha <= beta)) throw ValidationError("growth constants need alpha <= beta");
}

void StructuralConstants::validate() const {
  if (!(L >= 0.0)) throw ValidationError("Lipschitz bound L must be nonnegative");
  growth.validate();
}

// --- SystemSpec -------------------------------------------------------------

const MatrixFamily& SystemSpec::observation() const {
  if (!C) throw MissingObservation("system has no observation family C");
  return *C;
}

const MatrixFamily& SystemSpec::control() const {
  if (!B) throw MissingControl("system has no control family B");
  return *B;
}

SystemSpec SystemSpec::with_grid(TimeGrid g) const {
  SystemSpec out = *this;
  out.grid = g;
  return out;
}

void SystemSpec::validate(double tol_struct) const {
  const Index n = A.rows();
  if (n == 0 || A.cols() != n) throw ValidationError("A must be a nonempty square matrix family");
  if (C && C->cols() != n)
    throw ValidationError("C has " + std::to_string(C->cols()) + " columns, expected " +
                          std::to_string(n));
  if (B && B->rows() != n)
    throw ValidationError("B has " + std::to_string(B->rows()) + " rows, expected " +
                          std::to_string(n));
  if (constants) constants->validate();
  for (std::size_t j = 0; j < grid.n_nodes(); ++j) {
    const Mat a = A.at_node(grid, j);
    if (!a.allFinite()) throw ValidationError("A(t) is not finite at node " + std::to_string(j));
    if (C && !C->at_node(grid, j).allFinite())
      throw ValidationError("C(t) is not finite at node " + std::to_string(j));
    if (B && !B->at_node(grid, j).allFinite())
      throw ValidationError("B(t) is not finite at node " + std::to_string(j));
  }
  if (A.skew_claimed()) {
    const double defect = skew_defect(A, grid);
    if (defect > tol_struct)
      throw ValidationError("A is claimed skew-adjoint but ||A + A*||/||A|| = " +
                            std::to_string(defect));
  }
}

// --- structural estimates ---------------------------------------------------

namespace {

std::vector<Mat> node_values(const MatrixFamily& f, const TimeGrid& grid) {
  std::vector<Mat> out(grid.n_nodes());
  for (std::size_t j = 0; j < grid.n_nodes(); ++j) out[j] = f.at_node(grid, j);
  return out;
}

}  // namespace

double lipschitz_bound(const MatrixFamily& a, const TimeGrid& grid) {
  if (a.kind() == MatrixFamily::Kind::constant) return 0.0;
  if (a.kind() == MatrixFamily::Kind::base_plus_perturbation && a.terms().size() == 1) {
    // A(t_i) - A(t_j) = (c_i - c_j) R
    const auto& term = a.terms().front();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t j = 0; j < grid.n_nodes(); ++j) {
      const double c = term.profile(grid.node(j));
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    return (hi - lo) * op_norm(term.matrix);
  }

  // Branch and bound over pairs: ||A_i - A_j|| <= d_i + d_j with d the
  // distance to node 0.
  const auto values = node_values(a, grid);
  const std::size_t n = values.size();
  std::vector<double> d(n);
  parallel_for(n, [&](std::size_t j) { d[j] = op_norm(values[j] - values[0]); });
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return d[x] > d[y]; });
  double best = *std::max_element(d.begin(), d.end());
  for (std::size_t p = 0; p + 1 < n; ++p) {
    const std::size_t i = order[p];
    if (d[i] + d[order[p + 1]] <= best) break;
    for (std::size_t q = p + 1; q < n; ++q) {
      const std::size_t j = order[q];
      if (d[i] + d[j] <= best) break;
      best = std::max(best, op_norm(values[i] - values[j]));
    }
  }
  return best;
}

double max_norm(const MatrixFamily& f, const TimeGrid& grid) {
  if (f.kind() == MatrixFamily::Kind::constant) return op_norm(f.base());
  std::vector<double> norms(grid.n_nodes());
  parallel_for(grid.n_nodes(), [&](std::size_t j) {
    norms[j] = std::max(op_norm(f.at_node(grid, j, Side::left)), op_norm(f.at_node(grid, j, Side::right)));
  });
  return *std::max_element(norms.begin(), norms.end());
}

double skew_defect(const MatrixFamily& a, const TimeGrid& grid) {
  if (a.kind() == MatrixFamily::Kind::constant) return skew_defect(a.base());
  std::vector<double> defects(grid.n_nodes());
  parallel_for(grid.n_nodes(), [&](std::size_t j) { defects[j] = skew_defect(a.at_node(grid, j)); });
  return *std::max_element(defects.begin(), defects.end());
}

GrowthBounds growth_bounds(const EvolutionTable& table, std::size_t max_nodes) {
  for (std::size_t j = 0; j < table.n_steps(); ++j) {
    if (singular_extremes(table.step(j)).min <= 0.0)
      throw SingularPropagator("growth_bounds", "step propagator " + std::to_string(j) + " is singular");
  }
  struct LogPair {
    double dt;
    double log_min;
    double log_max;
  };
  std::vector<LogPair> pairs;
  for (const auto& p : sample_pairs(table, max_nodes)) {
    if (!(p.s_min > 0.0)) throw SingularPropagator("growth_bounds", "U(t_j, t_i) is singular");
    pairs.push_back({p.dt, std::log(p.s_min), std::log(p.s_max)});
  }
  if (pairs.empty()) return {};

  const TimeGrid& grid = table.grid();
  const double tau = grid.tau();
  // Upper envelope: log K(beta) = max(0, max_p log_max_p - beta dt_p); the fit
  // minimises tau log K + beta tau^2 / 2 (mean log-bound over [0, tau]).
  double beta_one = -std::numeric_limits<double>::infinity();
  double alpha_one = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    beta_one = std::max(beta_one, p.log_max / p.dt);
    alpha_one = std::min(alpha_one, p.log_min / p.dt);
  }
  auto log_K = [&](double beta) {
    double v = 0.0;
    for (const auto& p : pairs) v = std::max(v, p.log_max - beta * p.dt);
    return v;
  };
  auto log_k = [&](double alpha) {
    double v = 0.0;
    for (const auto& p : pairs) v = std::min(v, p.log_min - alpha * p.dt);
    return v;
  };
  const double span = std::abs(beta_one) + std::abs(alpha_one) + 1.0;
  auto upper_cost = [&](double b) { return tau * log_K(b) + 0.5 * b * tau * tau; };
  auto lower_cost = [&](double a) { return -(tau * log_k(a) + 0.5 * a * tau * tau); };
  double beta = golden_min(upper_cost, beta_one - 10.0 * span, beta_one);
  if (upper_cost(beta_one) <= upper_cost(beta)) beta = beta_one;
  double alpha = golden_min(lower_cost, alpha_one, alpha_one + 10.0 * span);
  if (lower_cost(alpha_one) <= lower_cost(alpha)) alpha = alpha_one;

  // Slack covers exp(log(.)) and products formed in a different order.
  constexpr double slack = 1e-12;
  GrowthBounds out;
  out.beta = beta;
  out.alpha = std::min(alpha, beta);
  out.K = std::exp(log_K(beta)) * (1.0 + slack);
  out.k = std::exp(log_k(out.alpha)) * (1.0 - slack);
  return out;
}

}  // namespace avgh
