#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "avgh/evolution.hpp"
#include "avgh/system.hpp"

namespace avgh {

enum class GramianKind { observability, controllability, averaged, final_time_pencil };
std::string to_string(GramianKind kind);

struct GramianReport {
  GramianKind kind = GramianKind::observability;
  double tau = 0.0;
  double s = 0.0;  // start time of the integral
  Mat G;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Vec v_min;
  /// PSD clamps and other non-fatal findings; never silent.
  std::vector<std::string> warnings;
};

/// Symmetrises G, extracts the extremal eigen-data and clamps eigenvalues
/// below tol_eig = 1e-10 lambda_max to zero with a warning.
GramianReport make_gramian_report(GramianKind kind, Mat g, double tau, double s = 0.0,
                                  double rel_tol_eig = 1e-10);

/// G_s = int_{t_s}^tau U(t,t_s)^* C^* C U(t,t_s) dt (composite Simpson).
GramianReport observability_gramian(const SystemSpec& sys, const EvolutionTable& u, std::size_t s = 0);

/// G_s for every node s via G_s = local group + U^* G_next U.
std::vector<Mat> observability_sweep(const SystemSpec& sys, const EvolutionTable& u);

struct SweepRow {
  double s = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

struct AdmissibilityResult {
  double M_tau = 0.0;  // sqrt(max_s lambda_max(G_s))
  std::vector<SweepRow> rows;
};

/// Admissibility constant M_tau over every stride-th node.
AdmissibilityResult admissibility_constant(const SystemSpec& sys, const EvolutionTable& u,
                                           std::size_t stride = 1);

/// Largest kappa with G_0 >= kappa U(tau,0)^* U(tau,0).
double final_time_constant(const SystemSpec& sys, const EvolutionTable& u);

/// P_bar = (1/tau) int C^* C.
Mat averaged_output_matrix(const SystemSpec& sys);

/// G_avg = int U(t,0)^* P_bar U(t,0) dt.
GramianReport averaged_gramian(const SystemSpec& sys, const EvolutionTable& u);

/// W_s = int_{t_s}^tau U(tau,r) B B^* U(tau,r)^* dr.
GramianReport controllability_gramian(const SystemSpec& sys, const EvolutionTable& u, std::size_t s = 0);
std::vector<Mat> controllability_sweep(const SystemSpec& sys, const EvolutionTable& u);

/// max_s ||W_s - G_retro(s)|| with G_retro assembled from retrograde adjoint
/// states, one basis vector at a time.
double duality_defect(const SystemSpec& sys, const EvolutionTable& u, std::size_t stride = 1);

void write_report(std::ostream& os, const GramianReport& r, bool emit_matrix = false);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace avgh
