#include "avgh/linalg.hpp"

#include <algorithm>

#include <unsupported/Eigen/MatrixFunctions>

namespace avgh {

Mat expm(const Mat& m) { return m.exp(); }

SingularExtremes singular_extremes(const Mat& m) {
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  // rectangular inputs have min(rows, cols) singular values
  SingularExtremes out{s.minCoeff(), s.maxCoeff()};
  if (m.rows() != m.cols()) out.min = 0.0;
  return out;
}

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() > 32 || m.cols() > 32) {
    Eigen::BDCSVD<Mat> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

HermitianExtremes hermitian_extremes(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  const Index n = h.rows();
  return {es.eigenvalues()(0), es.eigenvalues()(n - 1), es.eigenvectors().col(0),
          es.eigenvectors().col(n - 1)};
}

double skew_defect(const Mat& a) {
  const double scale = std::max(op_norm(a), 1e-300);
  return op_norm(a + a.adjoint()) / scale;
}

}  // namespace avgh
