#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "avgh/system.hpp"

namespace avgh {

/// Time averages over [0, tau] that determine the AH.2 quadratic forms.
struct MomentMatrices {
  Mat P_bar;  // (1/tau) int C^* C
  Mat A_bar;  // (1/tau) int A
  Mat S_bar;  // (1/tau) int A^* A
  double tau = 0.0;

  Index dim() const { return P_bar.rows(); }
  /// Q(xi) = xi^2 I + i xi (A_bar^* - A_bar) + S_bar.
  Mat Q(double xi) const;
  /// -Im of the eigenvalues of A_bar: where Q can lose rank.
  std::vector<double> candidate_frequencies() const;
};

MomentMatrices moment_matrices(const SystemSpec& sys);

/// M(m) of the Hautus curve: finite value or the explicit infinite marker.
struct HautusBound {
  bool finite = true;
  double value = 0.0;

  static HautusBound infinite() { return {false, 0.0}; }
  static HautusBound of(double v) { return {true, v}; }
  std::string to_string() const;
};

struct AH2Options {
  double tol = 1e-9;
  /// Upper limit for the grid spacing; the effective floor is min(this, 1/(10 M sigma + 1)).
  double max_spacing = 0.05;
  std::size_t max_points = 20'000'000;
  /// Scan pieces evaluated independently; fixed so results do not depend on threads.
  std::size_t chunks = 16;
  bool keep_scan = false;
};

struct XiSample {
  double xi = 0.0;
  double margin = 0.0;
};

struct AH2Verdict {
  bool holds = false;
  double min_margin = 0.0;
  double xi_star = 0.0;
  Vec x_star;
  double Xi = 0.0;
  bool tail_certified = false;
  std::size_t points = 0;
  std::string reason;
  std::vector<XiSample> scan;
};

/// lambda_min(m^2 P_bar + M^2 Q(xi) - I) at one frequency.
double ah2_margin(const MomentMatrices& mm, double m, double M, double xi, Vec* x_min = nullptr);

/// Certified scan of the AH.2 margin over [-Xi, Xi], Xi = sigma_max + 1/M, plus
/// the analytic tail bound beyond Xi.
AH2Verdict verify_AH2(const MomentMatrices& mm, double m, double M, double sigma_max,
                      const AH2Options& opts = {});

struct CurvePoint {
  double m = 0.0;
  HautusBound M;
};

/// Smallest M (to relative 1e-7) that verifies AH.2 for each m, or the
/// infinite marker when an unobserved kernel direction of Q exists.
std::vector<CurvePoint> fit_constants(const MomentMatrices& mm, const std::vector<double>& m_grid,
                                      double sigma_max, const AH2Options& opts = {});

/// Geometric m-grid starting where I - m^2 P_bar stops being positive definite.
std::vector<double> default_m_grid(const MomentMatrices& mm, std::size_t count = 8);

/// Picks the curve point with the smallest finite 2 pi M, ties broken by smaller m.
CurvePoint best_curve_point(const std::vector<CurvePoint>& curve);

struct AH1Options {
  std::size_t n_samples = 8;
  std::uint64_t seed = 42;
  std::size_t descent_steps = 50;
  std::size_t quad_panels = 128;  // even
  double tol = 1e-9;
};

struct AH1Verdict {
  bool violation_found = false;
  double min_margin = 0.0;
  cplx lambda = 0.0;
  Vec x;
  std::size_t lambdas_checked = 0;
};

/// (e^{2 tau s} - 1)/(2 tau s): the average of e^{2 s t} over [0, tau].
double ah3_factor(double re_lambda, double tau);

/// AH.1 margin at (lambda, x), both mixed-norm terms by quadrature.
double ah1_margin(const SystemSpec& sys, double m, double M, cplx lambda, const Vec& x,
                  std::size_t quad_panels = 128);

/// Searches for (lambda, x) violating AH.1. No violation found is not a proof.
AH1Verdict verify_AH1(const SystemSpec& sys, double m, double M, const std::vector<cplx>& lambda_grid,
                      const AH1Options& opts = {});

/// {sigma + i xi}: sigma in {-1, -0.1, 0, 0.1, 1}/tau, xi on n_xi points of
/// [-Xi, Xi] plus the candidate frequencies.
std::vector<cplx> default_lambda_grid(const MomentMatrices& mm, double M, double sigma_max,
                                      std::size_t n_xi = 101);

struct NecessaryConstants {
  double m = 0.0;
  double M = 0.0;
};

/// m = sqrt(2 tau / kappa), M = K_adm tau sqrt(2 / kappa).
NecessaryConstants constants_from_observability(double kappa, double K_adm, double tau);

struct HautusReport {
  MomentMatrices moments;
  double sigma_max = 0.0;
  std::vector<CurvePoint> curve;
  double m_query = 0.0;
  double M_query = 0.0;
  AH2Verdict verdict;
};

HautusReport hautus_report(const SystemSpec& sys, const std::vector<double>& m_grid, double m_query,
                           double M_query, const AH2Options& opts = {});

void write_report(std::ostream& os, const HautusReport& r, bool emit_matrices = false);
void write_scan_csv(std::ostream& os, const std::vector<XiSample>& scan);
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

}  // namespace avgh
