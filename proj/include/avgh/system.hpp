#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "avgh/profile.hpp"
#include "avgh/quadrature.hpp"
#include "avgh/types.hpp"

namespace avgh {

class EvolutionTable;

/// Uniform partition t_j = j * tau / n_steps of [0, tau].
class TimeGrid {
 public:
  TimeGrid(double tau, std::size_t n_steps);

  double tau() const { return tau_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_nodes() const { return n_steps_ + 1; }
  double dt() const { return tau_ / static_cast<double>(n_steps_); }
  double node(std::size_t j) const {
    return j == n_steps_ ? tau_ : tau_ * static_cast<double>(j) / static_cast<double>(n_steps_);
  }

 private:
  double tau_;
  std::size_t n_steps_;
};

struct PerturbationTerm {
  TimeProfile profile;
  Mat matrix;
};

/// Time-dependent matrix family t -> F(t): constant, base plus a catalog of
/// scalar-profile perturbations, or samples with linear interpolation.
/// Serves as A(t) (n x n), C(t) (p x n) and B(t) (n x q).
class MatrixFamily {
 public:
  enum class Kind { constant, base_plus_perturbation, sampled };

  static MatrixFamily constant(Mat m);
  static MatrixFamily perturbed(Mat base, std::vector<PerturbationTerm> terms);
  static MatrixFamily sampled(std::vector<double> times, std::vector<Mat> samples);

  Kind kind() const { return kind_; }
  Index rows() const { return base_.rows(); }
  Index cols() const { return base_.cols(); }
  const Mat& base() const { return base_; }
  const std::vector<PerturbationTerm>& terms() const { return terms_; }
  const std::vector<double>& sample_times() const { return times_; }
  const std::vector<Mat>& samples() const { return samples_; }

  Mat operator()(double t, Side side = Side::center) const;
  Mat at_node(const TimeGrid& grid, std::size_t j, Side side = Side::center) const {
    return (*this)(grid.node(j), side);
  }

  /// The part R(t) = F(t) - base (zero family for constant/sampled kinds).
  MatrixFamily perturbation() const;
  /// Base matrix as a constant family.
  MatrixFamily unperturbed() const { return constant(base_); }
  MatrixFamily scaled(cplx factor) const;
  /// Scales only the perturbation terms.
  MatrixFamily with_perturbation_scaled(double factor) const;

  bool has_jumps() const;
  bool is_real() const;

  bool skew_claimed() const { return skew_claimed_; }
  MatrixFamily& claim_skew(bool claim = true) {
    skew_claimed_ = claim;
    return *this;
  }

 private:
  Kind kind_ = Kind::constant;
  Mat base_;
  std::vector<PerturbationTerm> terms_;
  std::vector<double> times_;
  std::vector<Mat> samples_;
  bool skew_claimed_ = false;
};

std::string to_string(MatrixFamily::Kind kind);

/// Two-sided growth estimate k e^{alpha (t-s)} |x| <= |U(t,s) x| <= K e^{beta (t-s)} |x|.
struct GrowthBounds {
  double k = 1.0;
  double K = 1.0;
  double alpha = 0.0;
  double beta = 0.0;

  double omega() const { return beta - alpha; }
  double lower(double dt) const;
  double upper(double dt) const;
  void validate() const;
};

struct StructuralConstants {
  double L = 0.0;  // Lipschitz-in-time bound sup ||A(t) - A(s)||
  GrowthBounds growth;
  void validate() const;
};

struct SystemSpec {
  MatrixFamily A;
  std::optional<MatrixFamily> C;
  std::optional<MatrixFamily> B;
  TimeGrid grid;
  std::optional<StructuralConstants> constants;
  bool is_complex = true;

  Index dim() const { return A.rows(); }
  const MatrixFamily& observation() const;
  const MatrixFamily& control() const;
  SystemSpec with_grid(TimeGrid g) const;
  /// Checks dimensions, finiteness and the skew claim. Throws ValidationError.
  void validate(double tol_struct = 1e-10) const;
};

/// sup over grid node pairs of ||A(t_i) - A(t_j)||.
double lipschitz_bound(const MatrixFamily& a, const TimeGrid& grid);

/// sup over grid nodes of ||F(t)||.
double max_norm(const MatrixFamily& f, const TimeGrid& grid);

/// sup over grid nodes of ||A + A*|| / ||A||.
double skew_defect(const MatrixFamily& a, const TimeGrid& grid);

/// Tightest growth constants valid on every evaluated grid pair. Grids with
/// more than max_nodes nodes are subsampled with a uniform node stride.
GrowthBounds growth_bounds(const EvolutionTable& table, std::size_t max_nodes = 513);

}  // namespace avgh
