#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qaec {

using cx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermTol = 1e-10;

// Rank-r orthogonal projector together with its declared rank.
struct Projector {
  CMatrix matrix;
  int rank = 0;
};

}  // namespace qaec
