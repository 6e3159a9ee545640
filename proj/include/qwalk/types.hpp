#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qwalk {

using Real = double;
using Complex = std::complex<double>;

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

}  // namespace qwalk
