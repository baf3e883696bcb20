#include "avgh/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "avgh/errors.hpp"
#include "avgh/linalg.hpp"
#include "avgh/parallel.hpp"

namespace avgh {

Mat step_propagator(const MatrixFamily& a, double t0, double t1, const MagnusOptions& opts) {
  const double h = t1 - t0;
  if (!(h > 0.0)) throw IndexOrder("step_propagator needs t0 < t1");
  if (a.kind() == MatrixFamily::Kind::constant) return expm(-h * a.base());

  const double offset = std::sqrt(3.0) / 6.0;
  const Mat a1 = a(t0 + (0.5 - offset) * h);
  const Mat a2 = a(t0 + (0.5 + offset) * h);
  // x' = M x with M = -A: Omega = h/2 (M1 + M2) + sqrt(3) h^2 / 12 [M2, M1]
  const Mat correction = (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
  const double size = op_norm(correction);
  if (size > opts.max_correction)
    throw StepTooLarge("step_propagator", "commutator correction " + std::to_string(size) +
                                              " exceeds " + std::to_string(opts.max_correction));
  const Mat omega = -0.5 * h * (a1 + a2) + correction;
  return expm(omega);
}

std::size_t default_steps(const MatrixFamily& a, double tau) {
  const TimeGrid probe(tau, 400);
  const double norm = max_norm(a, probe);
  std::size_t n = std::max<std::size_t>(200, static_cast<std::size_t>(std::ceil(40.0 * tau * norm)));
  if (n % 2 == 1) ++n;
  return n;
}

EvolutionTable::EvolutionTable(TimeGrid grid, std::vector<Mat> steps)
    : grid_(grid), steps_(std::move(steps)) {
  if (steps_.size() != grid_.n_steps())
    throw ValidationError("evolution table: expected " + std::to_string(grid_.n_steps()) +
                          " steps, got " + std::to_string(steps_.size()));
  dim_ = steps_.front().rows();
  for (std::size_t j = 0; j < steps_.size(); ++j) {
    if (steps_[j].rows() != dim_ || steps_[j].cols() != dim_)
      throw ValidationError("evolution table: step " + std::to_string(j) + " has the wrong shape");
    if (!steps_[j].allFinite())
      throw NumericalError("propagate", "step " + std::to_string(j) + " is not finite");
  }
  const std::size_t n = steps_.size();
  origin_.resize(n + 1);
  final_.resize(n + 1);
  origin_[0] = Mat::Identity(dim_, dim_);
  for (std::size_t j = 0; j < n; ++j) origin_[j + 1] = steps_[j] * origin_[j];
  final_[n] = Mat::Identity(dim_, dim_);
  for (std::size_t j = n; j-- > 0;) final_[j] = final_[j + 1] * steps_[j];
}

Mat EvolutionTable::between(std::size_t j, std::size_t i) const {
  if (i > j) throw IndexOrder("U(t_j, t_i) needs i <= j");
  if (j > n_steps()) throw IndexOrder("node index out of range");
  Mat out = Mat::Identity(dim_, dim_);
  for (std::size_t k = i; k < j; ++k) out = steps_[k] * out;
  return out;
}

Vec EvolutionTable::apply(std::size_t j, std::size_t i, const Vec& x) const {
  if (i > j) throw IndexOrder("apply needs i <= j");
  if (j > n_steps()) throw IndexOrder("node index out of range");
  Vec y = x;
  for (std::size_t k = i; k < j; ++k) y = steps_[k] * y;
  return y;
}

Vec EvolutionTable::retrograde_state(const Vec& z_tau, std::size_t s) const {
  if (s > n_steps()) throw IndexOrder("node index out of range");
  // U(tau, t_s)^* = Phi_s^* Phi_{s+1}^* ... Phi_{N-1}^*
  Vec z = z_tau;
  for (std::size_t k = n_steps(); k-- > s;) z = steps_[k].adjoint() * z;
  return z;
}

void EvolutionTable::write(std::ostream& os) const {
  os << "avgh-evolution 1\n";
  os << "dim " << dim_ << "\n";
  os << "n_steps " << n_steps() << "\n";
  os << std::setprecision(17) << "tau " << grid_.tau() << "\n";
  os << "field complex\n";
  for (const auto& m : steps_) {
    for (Index r = 0; r < dim_; ++r) {
      for (Index c = 0; c < dim_; ++c) {
        if (c) os << ' ';
        os << m(r, c).real() << ' ' << m(r, c).imag();
      }
      os << '\n';
    }
  }
}

EvolutionTable EvolutionTable::read(std::istream& is) {
  std::string word;
  int version = 0;
  if (!(is >> word >> version) || word != "avgh-evolution" || version != 1)
    throw ParseError("evolution dump: bad header");
  Index dim = 0;
  std::size_t n = 0;
  double tau = 0.0;
  std::string field;
  if (!(is >> word >> dim) || word != "dim" || dim <= 0) throw ParseError("evolution dump: bad dim");
  if (!(is >> word >> n) || word != "n_steps" || n == 0) throw ParseError("evolution dump: bad n_steps");
  if (!(is >> word >> tau) || word != "tau") throw ParseError("evolution dump: bad tau");
  if (!(is >> word >> field) || word != "field") throw ParseError("evolution dump: bad field");
  std::vector<Mat> steps(n, Mat(dim, dim));
  for (auto& m : steps) {
    for (Index r = 0; r < dim; ++r) {
      for (Index c = 0; c < dim; ++c) {
        double re = 0.0, im = 0.0;
        if (!(is >> re >> im)) throw ParseError("evolution dump: truncated matrix data");
        m(r, c) = cplx(re, im);
      }
    }
  }
  return EvolutionTable(TimeGrid(tau, n), std::move(steps));
}

std::vector<std::size_t> strided_nodes(std::size_t n_steps, std::size_t max_nodes) {
  max_nodes = std::max<std::size_t>(2, max_nodes);
  const std::size_t stride = n_steps + 1 <= max_nodes ? 1 : (n_steps + max_nodes - 2) / (max_nodes - 1);
  std::vector<std::size_t> nodes;
  for (std::size_t j = 0; j < n_steps; j += stride) nodes.push_back(j);
  nodes.push_back(n_steps);
  return nodes;
}

std::vector<PairSample> sample_pairs(const EvolutionTable& table, std::size_t max_nodes) {
  const auto nodes = strided_nodes(table.n_steps(), max_nodes);
  const std::size_t nb = nodes.size() - 1;
  std::vector<Mat> blocks(nb);
  parallel_for(nb, [&](std::size_t a) { blocks[a] = table.between(nodes[a + 1], nodes[a]); });
  const TimeGrid& grid = table.grid();
  std::vector<std::vector<PairSample>> per_start(nb);
  parallel_for(nb, [&](std::size_t a) {
    Mat product = Mat::Identity(table.dim(), table.dim());
    for (std::size_t b = a; b < nb; ++b) {
      product = blocks[b] * product;
      const auto s = singular_extremes(product);
      per_start[a].push_back({nodes[a], nodes[b + 1], grid.node(nodes[b + 1]) - grid.node(nodes[a]), s.min, s.max});
    }
  });
  std::vector<PairSample> out;
  for (auto& v : per_start) out.insert(out.end(), v.begin(), v.end());
  return out;
}

EvolutionTable propagate(const MatrixFamily& a, const TimeGrid& grid, const MagnusOptions& opts) {
  if (a.rows() != a.cols()) throw ValidationError("propagate needs a square generator");
  std::vector<Mat> steps(grid.n_steps());
  if (a.kind() == MatrixFamily::Kind::constant) {
    const Mat phi = expm(-grid.dt() * a.base());
    for (auto& s : steps) s = phi;
  } else {
    parallel_for(grid.n_steps(),
                 [&](std::size_t j) { steps[j] = step_propagator(a, grid.node(j), grid.node(j + 1), opts); });
  }
  return EvolutionTable(grid, std::move(steps));
}

EvolutionTable propagate(const SystemSpec& sys, const MagnusOptions& opts) {
  return propagate(sys.A, sys.grid, opts);
}

}  // namespace avgh
