#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "avgh/system.hpp"

namespace avgh {

struct MagnusOptions {
  /// StepTooLarge when the commutator correction exceeds this operator norm.
  double max_correction = 1.0;
};

/// Fourth-order Magnus step for x' = -A(t) x over [t0, t1] using the two
/// Gauss-Legendre nodes. Exact exponential when A is constant on the step;
/// unitary when A is skew-adjoint at both nodes.
Mat step_propagator(const MatrixFamily& a, double t0, double t1, const MagnusOptions& opts = {});

/// max(200, ceil(40 tau max ||A||)), rounded up to an even count.
std::size_t default_steps(const MatrixFamily& a, double tau);

/// Discrete evolution family on a grid. U(t_j, t_i) is the ordered product of
/// the stored step propagators, so the cocycle law holds by construction.
class EvolutionTable {
 public:
  EvolutionTable(TimeGrid grid, std::vector<Mat> steps);

  const TimeGrid& grid() const { return grid_; }
  std::size_t n_steps() const { return steps_.size(); }
  Index dim() const { return dim_; }
  const Mat& step(std::size_t j) const { return steps_[j]; }
  const std::vector<Mat>& steps() const { return steps_; }

  /// U(t_j, t_i) as a matrix; IndexOrder when i > j.
  Mat between(std::size_t j, std::size_t i) const;
  /// U(t_j, 0), cached.
  const Mat& from_origin(std::size_t j) const { return origin_[j]; }
  /// U(tau, t_j), cached.
  const Mat& to_final(std::size_t j) const { return final_[j]; }

  /// U(t_j, t_i) x by successive matrix-vector products.
  Vec apply(std::size_t j, std::size_t i, const Vec& x) const;
  /// U(tau, t_s)^* z_tau: the retrograde adjoint state at node s.
  Vec retrograde_state(const Vec& z_tau, std::size_t s) const;

  /// Text dump: header (dim, n_steps, tau, field) then row-major matrices.
  void write(std::ostream& os) const;
  static EvolutionTable read(std::istream& is);

 private:
  TimeGrid grid_;
  std::vector<Mat> steps_;
  Index dim_ = 0;
  std::vector<Mat> origin_;
  std::vector<Mat> final_;
};

/// Nodes 0, stride, 2 stride, ..., n_steps with at most max_nodes entries.
std::vector<std::size_t> strided_nodes(std::size_t n_steps, std::size_t max_nodes);

struct PairSample {
  std::size_t i = 0;
  std::size_t j = 0;
  double dt = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
};

/// Singular-value extremes of U(t_j, t_i) for all pairs i < j of strided_nodes.
/// Products are assembled from block propagators between consecutive subset nodes.
std::vector<PairSample> sample_pairs(const EvolutionTable& table, std::size_t max_nodes = 513);

EvolutionTable propagate(const MatrixFamily& a, const TimeGrid& grid, const MagnusOptions& opts = {});
EvolutionTable propagate(const SystemSpec& sys, const MagnusOptions& opts = {});

}  // namespace avgh
