#pragma once

#include <optional>
#include <string>

#include "presep/spa.hpp"
#include "presep/types.hpp"

namespace presep {

enum class PrecondKind { Identity, Sdp, PreWhiten, SpaBased };

std::string to_string(PrecondKind kind);
PrecondKind precond_kind_from_string(const std::string &name);

struct TruncatedSvd {
  Matrix U; // m x r, orthonormal columns
  Vector S; // r nonincreasing singular values
  Matrix V; // n x r, orthonormal columns
};

// Best rank-r approximation X ~= U diag(S) V'.
TruncatedSvd truncated_svd(const Matrix &X, Index r);

struct Preconditioner {
  Matrix Q; // r x m, applied as Q * X
  PrecondKind kind = PrecondKind::Identity;
  Index rank = 0;
  std::optional<TruncatedSvd> svd; // retained for diagnostics
  std::optional<double> cert;      // alpha_cert for the SDP kind
};

struct PrecondOptions {
  double alpha_target = 0.99;
  Index p = -1;       // SPA-based: columns to extract, default r
  int depth = 1;      // SPA-based: recursive preconditioning passes
  bool active_set = true; // SDP: use the active-set outer loop
};

// Truncated SVD, then MVEE on Sigma_r V_r' solved to alpha_target; the
// ellipsoid matrix is Cholesky-factored as A = P'P and Q = P U_r'.
Preconditioner sdp_precondition(const Matrix &X, Index r,
                                const PrecondOptions &opts = {});

// Q = Sigma_r^-1 U_r', i.e. (X X')^(-1/2) up to an orthogonal factor when
// m = r.
Preconditioner prewhiten(const Matrix &X, Index r);

// Pre-whitening restricted to the SPA-extracted columns.
Preconditioner spa_precondition(const Matrix &X, Index r, Index p,
                                int depth = 1);

Preconditioner make_preconditioner(const Matrix &X, Index r, PrecondKind kind,
                                   const PrecondOptions &opts = {});

// Builds the requested preconditioner and runs SPA on Q*X; for pre-whitening
// V_r' serves as Q*X directly.
ExtractionResult preconditioned_spa(const Matrix &X, Index r, PrecondKind kind,
                                    const PrecondOptions &opts = {});

} // namespace presep
