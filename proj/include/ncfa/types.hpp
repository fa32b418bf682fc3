#pragma once

#include <Eigen/Dense>
#include <complex>

namespace ncfa {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kFourPiSq = kTwoPi * kTwoPi;

}  // namespace ncfa
