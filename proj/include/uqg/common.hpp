#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <cmath>

#include <Eigen/Dense>

namespace uqg {

using cdouble = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Iterative routine failed to converge or produced a non-finite value.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A consistency audit failed (missed roots, ambiguous level matching, ...).
struct audit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// max-entry norm of M M^dagger - I
inline double unitarity_defect(const Matrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("unitarity_defect: matrix must be square");
  return (m * m.adjoint() - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

/// map a phase to (-pi, pi]
inline double principal_phase(double x) {
  x = std::fmod(x, two_pi);
  if (x <= -pi) x += two_pi;
  if (x > pi) x -= two_pi;
  return x;
}

/// circular distance between two phases, in [0, pi]
inline double phase_distance(double a, double b) {
  return std::abs(principal_phase(a - b));
}

}  // namespace uqg
