#pragma once

#include "avgh/types.hpp"

namespace avgh {

/// exp(M) by scaling-and-squaring with a degree-13 Pade approximant.
Mat expm(const Mat& m);

/// Largest singular value.
double op_norm(const Mat& m);

struct SingularExtremes {
  double min = 0.0;
  double max = 0.0;
};
SingularExtremes singular_extremes(const Mat& m);

struct HermitianExtremes {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Vec v_min;
  Vec v_max;
};
/// Extremal eigenpairs of the Hermitian part of h.
HermitianExtremes hermitian_extremes(const Mat& h);

inline Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

/// Relative distance from skew-adjointness, ||A + A*|| / max(||A||, 1e-300).
double skew_defect(const Mat& a);

}  // namespace avgh
