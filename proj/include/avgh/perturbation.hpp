#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "avgh/evolution.hpp"
#include "avgh/system.hpp"

namespace avgh {

/// sup over grid nodes of ||R(t)||.
double beta_sup(const MatrixFamily& R, const TimeGrid& grid);

/// 2 M^2 (1/tau) int ||R(s)||^2 ds.
double mu(const MatrixFamily& R, double M, const TimeGrid& grid);

struct TransferredConstants {
  double m = 0.0;
  double M = 0.0;
  bool weak = false;  // mu >= 0.5: (1 - mu)^{-1} inflates the constants
};

/// (m / sqrt(1 - mu), sqrt(2) M / sqrt(1 - mu)); MuTooLarge when mu >= 1.
TransferredConstants transferred_constants(double m, double M, double mu);

/// || U(t,s) x - e^{-(t-s) A0} x + int_s^t e^{-(t-r) A0} R(r) U(r,s) x dr || for the
/// family A0 + R(t) under x' = -A(t) x.
double duhamel_residual(const Mat& A0, const MatrixFamily& R, const EvolutionTable& U, std::size_t s,
                        std::size_t t, const Vec& x);

/// Largest positive part of sigma_max(U) - e^{beta dt} and e^{-beta dt} - sigma_min(U)
/// over sampled node pairs.
double quasi_contraction_check(const EvolutionTable& U, double beta, std::size_t max_nodes = 513);

/// 2 K + 2 tau K int sigma_R(r)^2 G_U(r)^2 dr with K the squared admissibility
/// constant of the unperturbed pair and G_U(r) = sup_{s <= r} ||U(r, s)||.
double admissibility_transfer(double K_tau, const MatrixFamily& R, const EvolutionTable& U,
                              std::size_t max_nodes = 513);

/// Lower bound on int ||C(t) U(t,0) x||^2 / ||x||^2 from a lower bound c of the
/// averaged double integral and a Holder modulus ||C(s) - C(t)|| <= L0 |t - s|^alpha.
/// growth_sq bounds ||U(t,0)||^2 (1 for unitary families).
double holder_floor(double c, double L0, double alpha, double tau, double growth_sq = 1.0);

/// sup over sampled node pairs of ||C(t) - C(s)|| / |t - s|^alpha.
double holder_constant(const MatrixFamily& C, const TimeGrid& grid, double alpha, std::size_t max_nodes = 513);

struct PerturbationReport {
  double beta_sup = 0.0;
  double mu = 0.0;
  bool transfer_defined = false;
  TransferredConstants transferred;
  std::string refusal;
  double duhamel_residual = 0.0;
  double quasi_violation = 0.0;
  double K_adm_transferred = 0.0;
};

/// Full chain for a base-plus-perturbation system with unperturbed constants (m, M)
/// and squared admissibility constant K_tau of the unperturbed pair.
PerturbationReport perturbation_report(const SystemSpec& sys, const EvolutionTable& U, double m, double M,
                                       double K_tau);

void write_report(std::ostream& os, const PerturbationReport& r);

}  // namespace avgh
