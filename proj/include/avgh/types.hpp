#pragma once

#include <complex>

#include <Eigen/Dense>

namespace avgh {

// All internal linear algebra is complex; real systems are embedded.
using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace avgh
