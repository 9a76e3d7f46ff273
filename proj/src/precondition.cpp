#include "presep/precondition.hpp"

#include <cmath>

#include "presep/mvee.hpp"

namespace presep {

namespace {
constexpr double kSvdCutoffRel = 1e-10; // relative to sigma_1
}

std::string to_string(PrecondKind kind) {
  switch (kind) {
  case PrecondKind::Identity:
    return "SPA";
  case PrecondKind::Sdp:
    return "SDP-SPA";
  case PrecondKind::PreWhiten:
    return "PW-SPA";
  case PrecondKind::SpaBased:
    return "SPA-SPA";
  }
  return "?";
}

PrecondKind precond_kind_from_string(const std::string &name) {
  if (name == "SPA" || name == "identity")
    return PrecondKind::Identity;
  if (name == "SDP-SPA" || name == "sdp")
    return PrecondKind::Sdp;
  if (name == "PW-SPA" || name == "pw")
    return PrecondKind::PreWhiten;
  if (name == "SPA-SPA" || name == "spa-prec")
    return PrecondKind::SpaBased;
  throw std::invalid_argument("unknown algorithm: " + name);
}

TruncatedSvd truncated_svd(const Matrix &X, Index r) {
  require(r >= 1 && r <= std::min(X.rows(), X.cols()),
          "r must be in [1, min(m,n)]");
  require_finite(X, "X");
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.U = svd.matrixU().leftCols(r);
  out.S = svd.singularValues().head(r);
  out.V = svd.matrixV().leftCols(r);
  return out;
}

Preconditioner sdp_precondition(const Matrix &X, Index r,
                                const PrecondOptions &opts) {
  auto svd = truncated_svd(X, r);
  if (svd.S[r - 1] <= kSvdCutoffRel * svd.S[0])
    throw RankError("data matrix numerically rank deficient at dimension " +
                        std::to_string(r - 1),
                    r - 1);
  const Matrix Y = svd.S.asDiagonal() * svd.V.transpose(); // r x n
  MveeOptions mvee_opts;
  mvee_opts.alpha_target = opts.alpha_target;
  const EllipsoidSolution sol =
      opts.active_set ? active_set_solve(Y, mvee_opts)
                      : solve_mvee(Y, mvee_opts);

  // A = P'P via Cholesky A = LL', P = L'. One diagonal jitter retry; A is
  // positive definite by construction so a second failure is a hard error.
  Matrix A = sol.A;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    A += (1e-12 * A.trace() / static_cast<double>(r)) *
         Matrix::Identity(r, r);
    llt.compute(A);
    if (llt.info() != Eigen::Success)
      throw RankError("Cholesky of the ellipsoid matrix failed", r - 1);
  }
  const Matrix P = llt.matrixL().toDenseMatrix().transpose();

  Preconditioner pc;
  pc.Q = P * svd.U.transpose();
  pc.kind = PrecondKind::Sdp;
  pc.rank = r;
  pc.cert = sol.alpha_cert;
  pc.svd = std::move(svd);
  return pc;
}

Preconditioner prewhiten(const Matrix &X, Index r) {
  auto svd = truncated_svd(X, r);
  if (svd.S[r - 1] <= kSvdCutoffRel * svd.S[0])
    throw RankError("data matrix numerically rank deficient at dimension " +
                        std::to_string(r - 1),
                    r - 1);
  Preconditioner pc;
  pc.Q = svd.S.cwiseInverse().asDiagonal() * svd.U.transpose();
  pc.kind = PrecondKind::PreWhiten;
  pc.rank = r;
  pc.svd = std::move(svd);
  return pc;
}

Preconditioner spa_precondition(const Matrix &X, Index r, Index p, int depth) {
  require(p >= r && p <= std::min(X.rows(), X.cols()),
          "need r <= p <= min(m,n)");
  require(depth >= 1, "depth must be at least 1");
  Matrix view = X;
  Preconditioner pc;
  for (int pass = 0; pass < depth; ++pass) {
    const auto picked = spa(view, p);
    if (static_cast<Index>(picked.indices.size()) < r)
      throw RankError("SPA terminated with fewer than r independent columns",
                      static_cast<Index>(picked.indices.size()));
    Matrix cols(X.rows(), static_cast<Index>(picked.indices.size()));
    for (std::size_t i = 0; i < picked.indices.size(); ++i)
      cols.col(static_cast<Index>(i)) = X.col(picked.indices[i]);
    pc = prewhiten(cols, r);
    view = pc.Q * X;
  }
  pc.kind = PrecondKind::SpaBased;
  return pc;
}

Preconditioner make_preconditioner(const Matrix &X, Index r, PrecondKind kind,
                                   const PrecondOptions &opts) {
  switch (kind) {
  case PrecondKind::Identity: {
    Preconditioner pc;
    pc.Q = Matrix::Identity(X.rows(), X.rows());
    pc.rank = r;
    return pc;
  }
  case PrecondKind::Sdp:
    return sdp_precondition(X, r, opts);
  case PrecondKind::PreWhiten:
    return prewhiten(X, r);
  case PrecondKind::SpaBased:
    return spa_precondition(X, r, opts.p < 0 ? r : opts.p, opts.depth);
  }
  throw std::invalid_argument("unknown preconditioner kind");
}

ExtractionResult preconditioned_spa(const Matrix &X, Index r, PrecondKind kind,
                                    const PrecondOptions &opts) {
  if (kind == PrecondKind::Identity)
    return spa(X, r);
  const Preconditioner pc = make_preconditioner(X, r, kind, opts);
  if (kind == PrecondKind::PreWhiten)
    return spa(pc.svd->V.transpose(), r); // Q*X = V_r' exactly
  return spa(pc.Q * X, r);
}

} // namespace presep
