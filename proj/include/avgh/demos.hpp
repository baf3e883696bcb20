#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "avgh/hautus.hpp"
#include "avgh/mintime.hpp"
#include "avgh/perturbation.hpp"
#include "avgh/system.hpp"

namespace avgh {

enum class DemoProfile { quick, full };
DemoProfile parse_profile(const std::string& s);
std::string to_string(DemoProfile p);

/// Spatial factor v(x) on (0, 1) of a separable coefficient a(t) v(x).
struct SpatialShape {
  enum class Kind { constant, linear, cosine, bump };
  Kind kind = Kind::constant;
  double center = 0.5;
  double width = 0.1;

  double operator()(double x) const;
};

std::string to_string(SpatialShape::Kind kind);
SpatialShape::Kind parse_shape_kind(const std::string& s);

struct CoefficientTerm {
  TimeProfile time;
  SpatialShape shape;
};

/// int_0^1 v(x) 2 sin(j pi x) sin(k pi x) dx for j, k = 1..n by 256-panel Simpson.
RMat project_shape(const SpatialShape& shape, std::size_t n_modes);

struct SchrodingerSpec {
  std::size_t n_modes = 8;
  double tau = 2.0;
  std::size_t n_steps = 0;  // 0: default_steps
  std::vector<CoefficientTerm> potential;
};

struct WaveSpec {
  std::size_t n_modes = 4;
  double tau = 0.0;  // 0: chosen by run_demo from the fitted constants
  std::size_t n_steps = 0;
  std::vector<CoefficientTerm> potential;
  std::vector<CoefficientTerm> damping;
};

/// Dimension-N system in the L2-orthonormal sine basis: A(t) = -i(D + V(t)),
/// D = diag(-(k pi)^2), observation row sqrt(2) k pi.
SystemSpec build_schrodinger(const SchrodingerSpec& spec);

/// Dimension-2N system in interleaved energy coordinates (k pi a_k, b_k) on [0, tau].
SystemSpec build_wave(const WaveSpec& spec, double tau);
/// build_wave at spec.tau, or when spec.tau = 0 at 1.05 times the smallest horizon
/// with a positive predicted floor (fixed-point iteration on the fitted constants).
SystemSpec build_wave(const WaveSpec& spec, DemoProfile profile);

struct ComparisonRow {
  std::string quantity;
  double predicted = 0.0;
  double measured = 0.0;
  std::string status;  // CONSISTENT, VIOLATION or NOT-PREDICTED
};

struct TruncationCheck {
  double tau0 = 0.0;
  double kappa_tau0 = 0.0;
  std::vector<std::pair<double, double>> rows;  // (tau, kappa of the truncated observation)
  double max_rel_deviation = 0.0;
  bool independent = false;
};

struct DemoReport {
  std::string kind;
  DemoProfile profile = DemoProfile::quick;
  double tau = 0.0;
  std::size_t n_steps = 0;
  Index dim = 0;
  bool skew = false;
  double L = 0.0;
  GrowthBounds growth;
  double kappa = 0.0;
  double M_tau = 0.0;
  double avg_floor = 0.0;  // lambda_min of the averaged Gramian
  std::vector<CurvePoint> curve;
  double m = 0.0;
  HautusBound M;
  TimeValue tau_star;
  OptimalR optimal;
  TimeValue tau_double_star;
  double kappa_phi = 0.0;
  std::optional<PerturbationReport> perturbation;
  std::optional<CurvePoint> unperturbed_constants;
  std::optional<TruncationCheck> truncation;
  std::vector<ComparisonRow> rows;

  std::size_t violations() const;
};

/// Propagate, measure kappa and M_tau, fit AH.2 constants, predict floors from
/// the minimal-time theory and compare with the measured Gramians.
DemoReport run_demo(const std::string& kind, const SystemSpec& sys, DemoProfile profile);

struct AmplitudeRow {
  double scale = 0.0;
  double mu = 0.0;
  bool transfer_defined = false;
  double m_prime = 0.0;
  double M_prime = 0.0;
  double measured_kappa = 0.0;
  double predicted_floor = 0.0;
  std::string refusal;
};

/// Scales the perturbation of sys by each factor; mu uses the constants fitted on
/// the unperturbed family, so rows past mu = 1 are refused.
std::vector<AmplitudeRow> amplitude_sweep(const SystemSpec& sys, const std::vector<double>& scales,
                                          DemoProfile profile);
/// Scales putting mu at the given fractions of 1.
std::vector<double> amplitude_scales_for_mu(const SystemSpec& sys, const std::vector<double>& mu_targets,
                                            DemoProfile profile);

/// kappa of C 1_{[0, tau0]} at tau = factor tau0 for each factor, with tau0 on an even node.
TruncationCheck truncated_observation_check(const SystemSpec& sys, double tau0, const std::vector<double>& factors,
                                            std::size_t steps_tau0 = 0);

void write_report(std::ostream& os, const DemoReport& r, bool with_comparison = true);
void write_comparison_csv(std::ostream& os, const DemoReport& r);
void write_amplitude_csv(std::ostream& os, const std::vector<AmplitudeRow>& rows);

}  // namespace avgh
