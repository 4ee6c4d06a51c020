#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace zakline {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;
using Index = Eigen::Index;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Bilinear pairing <chi|phi> = sum_i chi_i phi_i. No complex conjugation:
/// left vectors are stored as rows already.
inline Complex pairing(const RowVector& chi, const Vector& phi) {
  return (chi * phi)(0, 0);
}

}  // namespace zakline
