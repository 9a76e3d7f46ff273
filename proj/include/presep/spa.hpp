#pragma once

#include "presep/types.hpp"

namespace presep {

struct ExtractionResult {
  IndexList indices;                 // selected columns, in selection order
  std::vector<double> residual_norms; // ||R(:,p)||_2 at selection time
  bool terminated_early = false;      // residual became numerically zero
};

// Successive projection: repeatedly select the column of largest residual
// 2-norm (ties to the smallest index) and project every column onto the
// orthogonal complement of the selection. Squared norms are maintained
// incrementally with a periodic full recomputation; the selected indices
// equal those of the literal algorithm.
ExtractionResult spa(const Matrix &X, Index p, double zero_tol = 1e-12);

} // namespace presep
