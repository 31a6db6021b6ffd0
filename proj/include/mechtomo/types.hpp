#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace mechtomo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I_unit{0.0, 1.0};

}  // namespace mechtomo
