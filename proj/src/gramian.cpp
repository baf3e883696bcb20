#include "avgh/gramian.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "avgh/errors.hpp"
#include "avgh/linalg.hpp"
#include "avgh/parallel.hpp"
#include "avgh/report.hpp"

namespace avgh {

std::string to_string(GramianKind kind) {
  switch (kind) {
    case GramianKind::observability: return "observability";
    case GramianKind::controllability: return "controllability";
    case GramianKind::averaged: return "averaged";
    case GramianKind::final_time_pencil: return "final-time-pencil";
  }
  return "?";
}

GramianReport make_gramian_report(GramianKind kind, Mat g, double tau, double s, double rel_tol_eig) {
  GramianReport r;
  r.kind = kind;
  r.tau = tau;
  r.s = s;
  r.G = hermitian_part(g);
  const auto ext = hermitian_extremes(r.G);
  r.lambda_min = ext.lambda_min;
  r.lambda_max = ext.lambda_max;
  r.v_min = ext.v_min;
  const double tol = rel_tol_eig * std::max(std::abs(r.lambda_max), 0.0);
  if (r.lambda_min < 0.0) {
    if (r.lambda_min >= -tol || r.lambda_max <= 0.0) {
      r.warnings.push_back("lambda_min " + format_number(r.lambda_min) + " clamped to 0 (PSD roundoff)");
      r.lambda_min = 0.0;
    } else {
      r.warnings.push_back("Gramian is indefinite beyond roundoff: lambda_min " + format_number(r.lambda_min));
    }
  }
  return r;
}

namespace {

void require_observation(const SystemSpec& sys) { (void)sys.observation(); }

// Output Gram matrix C(t_j)^* C(t_j) at the requested side.
Mat output_gram(const SystemSpec& sys, std::size_t j, Side side) {
  const Mat c = sys.C->at_node(sys.grid, j, side);
  return c.adjoint() * c;
}

Mat input_gram(const SystemSpec& sys, std::size_t j, Side side) {
  const Mat b = sys.B->at_node(sys.grid, j, side);
  return b * b.adjoint();
}

}  // namespace

GramianReport observability_gramian(const SystemSpec& sys, const EvolutionTable& u, std::size_t s) {
  require_observation(sys);
  const std::size_t n = u.n_steps();
  if (s > n) throw IndexOrder("observability_gramian: start node out of range");
  const Index dim = u.dim();
  Mat g = Mat::Zero(dim, dim);
  const double h = u.grid().dt();
  Mat prop = Mat::Identity(dim, dim);
  std::size_t cur = s;
  for (const PanelGroup& group : panel_groups(s, n)) {
    const auto w = group_weights(group, h);
    for (std::size_t j = group.first; j <= group.last; ++j) {
      for (; cur < j; ++cur) prop = u.step(cur) * prop;
      g += w[j - group.first] * (prop.adjoint() * output_gram(sys, j, group_side(group, j)) * prop);
    }
  }
  return make_gramian_report(GramianKind::observability, g, u.grid().tau(), u.grid().node(s));
}

std::vector<Mat> observability_sweep(const SystemSpec& sys, const EvolutionTable& u) {
  require_observation(sys);
  const std::size_t n = u.n_steps();
  const Index dim = u.dim();
  const double h = u.grid().dt();
  std::vector<Mat> out(n + 1, Mat::Zero(dim, dim));
  for (std::size_t s = n; s-- > 0;) {
    // the first group of panel_groups(s, n) followed by G at its end node
    const PanelGroup group = panel_groups(s, n).front();
    const auto w = group_weights(group, h);
    Mat local = Mat::Zero(dim, dim);
    Mat prop = Mat::Identity(dim, dim);
    for (std::size_t j = group.first; j <= group.last; ++j) {
      if (j > group.first) prop = u.step(j - 1) * prop;
      local += w[j - group.first] * (prop.adjoint() * output_gram(sys, j, group_side(group, j)) * prop);
    }
    out[s] = local + prop.adjoint() * out[group.last] * prop;
  }
  return out;
}

AdmissibilityResult admissibility_constant(const SystemSpec& sys, const EvolutionTable& u, std::size_t stride) {
  const auto sweep = observability_sweep(sys, u);
  stride = std::max<std::size_t>(1, stride);
  std::vector<std::size_t> nodes;
  for (std::size_t s = 0; s < sweep.size(); s += stride) nodes.push_back(s);
  if (nodes.back() != sweep.size() - 1) nodes.push_back(sweep.size() - 1);
  AdmissibilityResult out;
  out.rows.resize(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const auto ext = hermitian_extremes(sweep[nodes[k]]);
    out.rows[k] = {u.grid().node(nodes[k]), ext.lambda_min, ext.lambda_max};
  });
  double worst = 0.0;
  for (const auto& row : out.rows) worst = std::max(worst, row.lambda_max);
  out.M_tau = std::sqrt(worst);
  return out;
}

double final_time_constant(const SystemSpec& sys, const EvolutionTable& u) {
  require_observation(sys);
  const Mat g0 = hermitian_part(observability_sweep(sys, u).front());
  const Mat& final_state = u.from_origin(u.n_steps());
  const Mat pencil = hermitian_part(final_state.adjoint() * final_state);
  const auto ext = hermitian_extremes(pencil);
  if (!(ext.lambda_min > 1e-13 * ext.lambda_max))
    throw SingularFinalState("final_time_constant", "U(tau,0)^* U(tau,0) is numerically singular");
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(g0, pencil, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()(0));
}

Mat averaged_output_matrix(const SystemSpec& sys) {
  require_observation(sys);
  const Index dim = sys.dim();
  const std::size_t n = sys.grid.n_steps();
  return integrate_nodes(0, n, sys.grid.dt(), Mat(Mat::Zero(dim, dim)),
                         [&](std::size_t j, Side side) { return output_gram(sys, j, side); }) /
         sys.grid.tau();
}

GramianReport averaged_gramian(const SystemSpec& sys, const EvolutionTable& u) {
  const Mat p_bar = averaged_output_matrix(sys);
  const Index dim = u.dim();
  const Mat g = integrate_nodes(0, u.n_steps(), u.grid().dt(), Mat(Mat::Zero(dim, dim)),
                                [&](std::size_t j, Side) -> Mat {
                                  const Mat& prop = u.from_origin(j);
                                  return prop.adjoint() * p_bar * prop;
                                });
  return make_gramian_report(GramianKind::averaged, g, u.grid().tau());
}

std::vector<Mat> controllability_sweep(const SystemSpec& sys, const EvolutionTable& u) {
  (void)sys.control();
  const std::size_t n = u.n_steps();
  const Index dim = u.dim();
  const double h = u.grid().dt();
  std::vector<Mat> out(n + 1, Mat::Zero(dim, dim));
  for (std::size_t s = n; s-- > 0;) {
    const PanelGroup group = panel_groups(s, n).front();
    const auto w = group_weights(group, h);
    Mat local = Mat::Zero(dim, dim);
    for (std::size_t j = group.first; j <= group.last; ++j) {
      const Mat& v = u.to_final(j);
      local += w[j - group.first] * (v * input_gram(sys, j, group_side(group, j)) * v.adjoint());
    }
    out[s] = local + out[group.last];
  }
  return out;
}

GramianReport controllability_gramian(const SystemSpec& sys, const EvolutionTable& u, std::size_t s) {
  if (s > u.n_steps()) throw IndexOrder("controllability_gramian: start node out of range");
  const auto sweep = controllability_sweep(sys, u);
  return make_gramian_report(GramianKind::controllability, sweep[s], u.grid().tau(), u.grid().node(s));
}

double duality_defect(const SystemSpec& sys, const EvolutionTable& u, std::size_t stride) {
  const auto forward = controllability_sweep(sys, u);
  const std::size_t n = u.n_steps();
  const Index dim = u.dim();

  // Z(t_j) = U(tau, t_j)^*, column k the retrograde state from e_k.
  std::vector<Mat> z(n + 1, Mat(dim, dim));
  parallel_for(static_cast<std::size_t>(dim), [&](std::size_t k) {
    Vec state = Vec::Unit(dim, static_cast<Index>(k));
    z[n].col(static_cast<Index>(k)) = state;
    for (std::size_t j = n; j-- > 0;) {
      state = u.step(j).adjoint() * state;
      z[j].col(static_cast<Index>(k)) = state;
    }
  });

  stride = std::max<std::size_t>(1, stride);
  std::vector<std::size_t> nodes;
  for (std::size_t s = 0; s < n; s += stride) nodes.push_back(s);
  std::vector<double> defects(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t idx) {
    const std::size_t s = nodes[idx];
    // (B^* Z)^* (B^* Z) = U(tau,t) B B^* U(tau,t)^*
    const Mat retro = integrate_nodes(s, n, u.grid().dt(), Mat(Mat::Zero(dim, dim)),
                                      [&](std::size_t j, Side side) -> Mat {
                                        const Mat y = sys.B->at_node(sys.grid, j, side).adjoint() * z[j];
                                        return y.adjoint() * y;
                                      });
    defects[idx] = op_norm(forward[s] - retro);
  });
  return defects.empty() ? 0.0 : *std::max_element(defects.begin(), defects.end());
}

void write_report(std::ostream& os, const GramianReport& r, bool emit_matrix) {
  os << "kind = " << to_string(r.kind) << "\n";
  os << "tau = " << format_number(r.tau) << "\n";
  os << "s = " << format_number(r.s) << "\n";
  os << "lambda_min = " << format_number(r.lambda_min) << "\n";
  os << "lambda_max = " << format_number(r.lambda_max) << "\n";
  for (const auto& w : r.warnings) os << "warning = " << w << "\n";
  if (emit_matrix) os << "matrix = " << format_matrix(r.G) << "\n";
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "s,lambda_min,lambda_max\n";
  for (const auto& row : rows)
    os << format_number(row.s) << ',' << format_number(row.lambda_min) << ',' << format_number(row.lambda_max)
       << '\n';
}

}  // namespace avgh
