#include "presep/spa.hpp"

#include <cmath>

namespace presep {

ExtractionResult spa(const Matrix &X, Index p, double zero_tol) {
  require(p >= 1 && p <= std::min(X.rows(), X.cols()),
          "p must be in [1, min(m,n)]");
  require_finite(X, "X");

  const Index n = X.cols();
  Vector norms2(n);
  for (Index j = 0; j < n; ++j)
    norms2[j] = X.col(j).squaredNorm();
  const double initial_max = std::sqrt(norms2.maxCoeff());

  ExtractionResult out;
  Matrix basis(X.rows(), p); // orthonormal directions selected so far
  Index k = 0;
  constexpr Index kRecomputeEvery = 8; // controls incremental-update drift
  while (k < p) {
    Index best = 0;
    double best2 = -1.0;
    for (Index j = 0; j < n; ++j) {
      if (norms2[j] > best2) {
        best2 = norms2[j];
        best = j;
      }
    }
    const double best_norm = std::sqrt(std::max(best2, 0.0));
    if (best_norm <= zero_tol * initial_max) {
      out.terminated_early = true;
      break;
    }
    // Residual of the selected column under the current basis.
    Vector res = X.col(best);
    if (k > 0)
      res -= basis.leftCols(k) * (basis.leftCols(k).transpose() * X.col(best));
    const double res_norm = res.norm();
    if (res_norm <= zero_tol * initial_max) {
      out.terminated_early = true;
      break;
    }
    basis.col(k) = res / res_norm;
    out.indices.push_back(best);
    out.residual_norms.push_back(best_norm);
    ++k;

    if (k % kRecomputeEvery == 0) {
      const Matrix coeff = basis.leftCols(k).transpose() * X;
      for (Index j = 0; j < n; ++j)
        norms2[j] =
            std::max(0.0, X.col(j).squaredNorm() - coeff.col(j).squaredNorm());
    } else {
      // basis.col(k-1) is orthogonal to the earlier directions, so its
      // inner product with the residual equals the one with X itself.
      const Vector g = X.transpose() * basis.col(k - 1);
      for (Index j = 0; j < n; ++j)
        norms2[j] = std::max(0.0, norms2[j] - g[j] * g[j]);
    }
  }
  return out;
}

} // namespace presep
