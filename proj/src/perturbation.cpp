#include "avgh/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "avgh/errors.hpp"
#include "avgh/linalg.hpp"
#include "avgh/parallel.hpp"
#include "avgh/report.hpp"

namespace avgh {

double beta_sup(const MatrixFamily& R, const TimeGrid& grid) { return max_norm(R, grid); }

double mu(const MatrixFamily& R, double M, const TimeGrid& grid) {
  if (!(M >= 0.0)) throw ValidationError("mu: M must be nonnegative");
  const double integral = integrate_nodes(0, grid.n_steps(), grid.dt(), 0.0, [&](std::size_t j, Side side) {
    const double n = op_norm(R.at_node(grid, j, side));
    return n * n;
  });
  return 2.0 * M * M * integral / grid.tau();
}

TransferredConstants transferred_constants(double m, double M, double mu_value) {
  if (!(mu_value < 1.0))
    throw MuTooLarge("transferred_constants", "mu = " + format_number(mu_value) + " is not below 1");
  if (!(mu_value >= 0.0)) throw ValidationError("transferred_constants: mu must be nonnegative");
  const double s = std::sqrt(1.0 - mu_value);
  return {m / s, std::sqrt(2.0) * M / s, mu_value >= 0.5};
}

double duhamel_residual(const Mat& A0, const MatrixFamily& R, const EvolutionTable& U, std::size_t s,
                        std::size_t t, const Vec& x) {
  if (s > t) throw IndexOrder("duhamel_residual needs s <= t");
  if (t > U.n_steps()) throw IndexOrder("duhamel_residual: node index out of range");
  const TimeGrid& grid = U.grid();
  const Mat e = expm(-grid.dt() * A0);
  std::vector<Vec> y(t - s + 1);
  y[0] = x;
  for (std::size_t k = s; k < t; ++k) y[k - s + 1] = U.step(k) * y[k - s];

  // Horner form of sum_k w_k e^{-(t - t_k) A0} R(t_k) y_k
  Vec acc = Vec::Zero(x.size());
  Vec free = x;
  std::size_t cur = s;
  for (const PanelGroup& g : panel_groups(s, t)) {
    const auto w = group_weights(g, grid.dt());
    for (std::size_t j = g.first; j <= g.last; ++j) {
      while (cur < j) {
        acc = e * acc;
        ++cur;
      }
      acc += w[j - g.first] * (R.at_node(grid, j, group_side(g, j)) * y[j - s]);
    }
  }
  for (std::size_t k = s; k < t; ++k) free = e * free;
  return (y.back() - free + acc).norm();
}

double quasi_contraction_check(const EvolutionTable& U, double beta, std::size_t max_nodes) {
  double worst = 0.0;
  for (const auto& p : sample_pairs(U, max_nodes)) {
    worst = std::max(worst, p.s_max - std::exp(beta * p.dt));
    worst = std::max(worst, std::exp(-beta * p.dt) - p.s_min);
  }
  return worst;
}

double admissibility_transfer(double K_tau, const MatrixFamily& R, const EvolutionTable& U, std::size_t max_nodes) {
  if (!(K_tau >= 0.0)) throw ValidationError("admissibility_transfer: K_tau must be nonnegative");
  const TimeGrid& grid = U.grid();
  const auto nodes = strided_nodes(U.n_steps(), max_nodes);
  // G_U at the subset nodes; between them the larger neighbour value is used
  std::vector<double> g(nodes.size(), 1.0);
  for (const auto& p : sample_pairs(U, max_nodes)) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), p.j);
    g[static_cast<std::size_t>(it - nodes.begin())] =
        std::max(g[static_cast<std::size_t>(it - nodes.begin())], p.s_max);
  }
  auto g_at = [&](std::size_t j) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), j);
    const std::size_t b = static_cast<std::size_t>(it - nodes.begin());
    if (*it == j) return g[b];
    return std::max(g[b], g[b - 1]);
  };
  const double integral = integrate_nodes(0, grid.n_steps(), grid.dt(), 0.0, [&](std::size_t j, Side side) {
    const double r = op_norm(R.at_node(grid, j, side));
    const double gu = g_at(j);
    return r * r * gu * gu;
  });
  return 2.0 * K_tau + 2.0 * grid.tau() * K_tau * integral;
}

double holder_floor(double c, double L0, double alpha, double tau, double growth_sq) {
  if (!(alpha > 0.0) || !(tau > 0.0)) throw ValidationError("holder_floor: alpha and tau must be positive");
  const double loss = 2.0 * L0 * L0 * growth_sq * std::pow(tau, 2.0 * alpha + 2.0) / ((2.0 * alpha + 1.0) * (alpha + 1.0));
  return (c - loss) / (2.0 * tau);
}

double holder_constant(const MatrixFamily& C, const TimeGrid& grid, double alpha, std::size_t max_nodes) {
  const auto nodes = strided_nodes(grid.n_steps(), max_nodes);
  std::vector<Mat> values(nodes.size());
  for (std::size_t a = 0; a < nodes.size(); ++a) values[a] = C.at_node(grid, nodes[a]);
  std::vector<double> worst(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const double d = grid.node(nodes[b]) - grid.node(nodes[a]);
      worst[a] = std::max(worst[a], op_norm(values[b] - values[a]) / std::pow(d, alpha));
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

PerturbationReport perturbation_report(const SystemSpec& sys, const EvolutionTable& U, double m, double M,
                                       double K_tau) {
  const MatrixFamily R = sys.A.perturbation();
  PerturbationReport r;
  r.beta_sup = beta_sup(R, sys.grid);
  r.mu = mu(R, M, sys.grid);
  try {
    r.transferred = transferred_constants(m, M, r.mu);
    r.transfer_defined = true;
  } catch (const MuTooLarge& e) {
    r.refusal = e.what();
  }
  const Index n = sys.dim();
  Vec x = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
  r.duhamel_residual = duhamel_residual(sys.A.base(), R, U, 0, U.n_steps(), x);
  r.quasi_violation = quasi_contraction_check(U, r.beta_sup);
  r.K_adm_transferred = admissibility_transfer(K_tau, R, U);
  return r;
}

void write_report(std::ostream& os, const PerturbationReport& r) {
  os << "beta_sup = " << format_number(r.beta_sup) << "\n";
  os << "mu = " << format_number(r.mu) << "\n";
  if (r.transfer_defined) {
    os << "m_prime = " << format_number(r.transferred.m) << "\n";
    os << "M_prime = " << format_number(r.transferred.M) << "\n";
    if (r.transferred.weak) os << "warning = weak transfer (mu >= 0.5)\n";
  } else {
    os << "transfer = refused (" << r.refusal << ")\n";
  }
  os << "duhamel_residual = " << format_number(r.duhamel_residual) << "\n";
  os << "quasi_contraction_violation = " << format_number(r.quasi_violation) << "\n";
  os << "K_adm_transferred = " << format_number(r.K_adm_transferred) << "\n";
}

}  // namespace avgh
