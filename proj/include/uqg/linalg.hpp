#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "uqg/common.hpp"
#include "uqg/rng.hpp"

namespace uqg {

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// diagonal phase correction (Mezzadri's recipe).
inline Matrix haar_unitary(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("haar_unitary: dimension must be >= 1");
  Matrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      z(i, j) = cdouble(rng.normal(), rng.normal()) / std::sqrt(2.0);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    cdouble d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

struct EigenSystem {
  RealVector phases;  // sorted in (-pi, pi]
  Matrix vectors;     // columns follow the sort; empty when not requested
};

/// Eigenphases (and optionally eigenvectors) of a numerically unitary matrix.
/// Degenerate groups (phase gap <= pair_tol) are re-orthonormalized.
inline EigenSystem eig_unitary(const Matrix& u, bool with_vectors,
                               double pair_tol = 1e-9) {
  Eigen::ComplexEigenSolver<Matrix> es(u, with_vectors);
  if (es.info() != Eigen::Success)
    throw numerical_error("eig_unitary: eigensolver did not converge");
  const int n = static_cast<int>(u.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  RealVector ph(n);
  for (int i = 0; i < n; ++i) ph(i) = std::arg(es.eigenvalues()(i));
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ph(a) < ph(b); });

  EigenSystem out;
  out.phases.resize(n);
  for (int i = 0; i < n; ++i) out.phases(i) = ph(order[i]);
  if (with_vectors) {
    out.vectors.resize(n, n);
    for (int i = 0; i < n; ++i) out.vectors.col(i) = es.eigenvectors().col(order[i]);
    // Gram-Schmidt inside degenerate groups
    int i = 0;
    while (i < n) {
      int j = i + 1;
      while (j < n && out.phases(j) - out.phases(j - 1) <= pair_tol) ++j;
      for (int a = i; a < j; ++a) {
        for (int b = i; b < a; ++b)
          out.vectors.col(a) -= out.vectors.col(b).dot(out.vectors.col(a)) * out.vectors.col(b);
        out.vectors.col(a).normalize();
      }
      i = j;
    }
  }
  return out;
}

/// log|det| and phase of det from a partial-pivoting LU (no overflow)
struct LogDet {
  double log_abs;
  cdouble phase;  // unit modulus
  cdouble value() const { return phase * std::exp(log_abs); }
};

inline LogDet log_det(const Matrix& m) {
  Eigen::PartialPivLU<Matrix> lu(m);
  LogDet out{0.0, cdouble(1.0, 0.0)};
  const auto& d = lu.matrixLU().diagonal();
  for (int i = 0; i < d.size(); ++i) {
    const double a = std::abs(d(i));
    if (a == 0.0) return {-std::numeric_limits<double>::infinity(), cdouble(0, 0)};
    out.log_abs += std::log(a);
    out.phase *= d(i) / a;
  }
  const int sign = static_cast<int>(lu.permutationP().determinant());
  out.phase *= static_cast<double>(sign);
  return out;
}

/// smallest singular value
inline double smallest_singular_value(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

inline RealVector singular_values(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

}  // namespace uqg
