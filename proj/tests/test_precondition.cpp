#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "presep/analysis.hpp"
#include "presep/precondition.hpp"
#include "presep/rng.hpp"
#include "presep/separable_model.hpp"

using namespace presep;

namespace {

Matrix random_square_W(Index r, std::uint64_t seed, double diag_boost = 0.5) {
  Rng rng(seed);
  Matrix W(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      W(i, j) = rng.uniform() + (i == j ? diag_boost : 0.0);
  return W;
}

// Noiseless separable data with strict submixtures.
Matrix separable_data(const Matrix &W, Index n_mixed, std::uint64_t seed,
                      Matrix *H_out = nullptr) {
  const Index r = W.cols();
  Rng rng(seed);
  Matrix H = Matrix::Zero(r, r + n_mixed);
  H.leftCols(r) = Matrix::Identity(r, r);
  for (Index j = r; j < H.cols(); ++j) {
    Vector h(r);
    for (Index i = 0; i < r; ++i)
      h[i] = rng.uniform();
    H.col(j) = 0.9 * h / h.sum();
  }
  if (H_out)
    *H_out = H;
  return W * H;
}

} // namespace

TEST_CASE("truncated_svd: diagonal example") {
  Matrix X = Vector{{3.0, 2.0, 1.0}}.asDiagonal();
  const auto svd = truncated_svd(X, 2);
  CHECK(svd.S[0] == doctest::Approx(3.0));
  CHECK(svd.S[1] == doctest::Approx(2.0));
  for (Index j = 0; j < 2; ++j) {
    CHECK(std::abs(std::abs(svd.U(j, j))) == doctest::Approx(1.0));
    CHECK(std::abs(std::abs(svd.V(j, j))) == doctest::Approx(1.0));
  }
}

TEST_CASE("truncated_svd: rank-1 outer product") {
  Rng rng(1);
  Vector a(5), b(7);
  for (Index i = 0; i < 5; ++i)
    a[i] = rng.gaussian();
  for (Index i = 0; i < 7; ++i)
    b[i] = rng.gaussian();
  const auto svd = truncated_svd(a * b.transpose(), 1);
  CHECK(svd.S[0] == doctest::Approx(a.norm() * b.norm()).epsilon(1e-12));
}

TEST_CASE("truncated_svd: residual energy equals the tail spectrum") {
  Rng rng(2);
  Matrix X(40, 210);
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j)
      X(i, j) = rng.uniform();
  const Index r = 20;
  const auto svd = truncated_svd(X, r);
  const Matrix approx = svd.U * svd.S.asDiagonal() * svd.V.transpose();
  // Independent spectrum from the eigendecomposition of X'X.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(X.transpose() * X);
  double tail = 0.0;
  const Index total = eig.eigenvalues().size();
  for (Index i = 0; i < total - r; ++i)
    tail += std::max(0.0, eig.eigenvalues()[i]);
  CHECK((X - approx).squaredNorm() == doctest::Approx(tail).epsilon(1e-10));
  // Orthonormality and ordering.
  CHECK((svd.U.transpose() * svd.U - Matrix::Identity(r, r)).norm() <= 1e-10);
  CHECK((svd.V.transpose() * svd.V - Matrix::Identity(r, r)).norm() <= 1e-10);
  CHECK(std::is_sorted(svd.S.data(), svd.S.data() + r, std::greater<>()));
}

TEST_CASE("sdp_precondition: identity data gives an orthogonal Q") {
  const auto pc = sdp_precondition(Matrix::Identity(3, 3), 3);
  CHECK((pc.Q.transpose() * pc.Q - Matrix::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() <= 1e-8);
  CHECK(condition_number(pc.Q) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(pc.cert.has_value());
}

TEST_CASE("sdp_precondition: noiseless separable data conditions W") {
  const Index r = 4;
  const Matrix W = random_square_W(r, 3);
  const Matrix X = separable_data(W, 20, 4);
  PrecondOptions opts;
  opts.alpha_target = 0.9999;
  const auto pc = sdp_precondition(X, r, opts);
  CHECK(condition_number(pc.Q * W) <= 1.0 + 10.0 * (1.0 - *pc.cert));
}

TEST_CASE("prewhiten closed forms") {
  SUBCASE("identity") {
    const auto pc = prewhiten(Matrix::Identity(3, 3), 3);
    CHECK((pc.Q * pc.Q.transpose() - Matrix::Identity(3, 3)).norm() <= 1e-10);
  }
  SUBCASE("diag(2,1) up to row signs") {
    Matrix X = Vector{{2.0, 1.0}}.asDiagonal();
    const auto pc = prewhiten(X, 2);
    CHECK(std::abs(pc.Q(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(pc.Q(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("whitened data has identity Gram matrix") {
    Rng rng(5);
    Matrix X(6, 30);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 30; ++j)
        X(i, j) = rng.gaussian();
    const auto pc = prewhiten(X, 6);
    const Matrix QX = pc.Q * X;
    CHECK((QX * QX.transpose() - Matrix::Identity(6, 6)).norm() <= 1e-8);
  }
  SUBCASE("rank deficiency raises") {
    Matrix X(3, 4);
    X.setRandom();
    X.row(2) = X.row(0) + X.row(1);
    CHECK_THROWS_AS(prewhiten(X, 3), RankError);
  }
}

TEST_CASE("spa_precondition: noiseless square case is exact") {
  const Index r = 5;
  const Matrix W = random_square_W(r, 7);
  const Matrix X = separable_data(W, 25, 8);
  const auto pc = spa_precondition(X, r, r);
  const Matrix QW = pc.Q * W;
  CHECK((QW * QW.transpose() - Matrix::Identity(r, r)).norm() <= 1e-8);
  CHECK(condition_number(QW) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("preconditioned_spa: identity kind equals plain spa") {
  const Matrix W = random_square_W(3, 9);
  const Matrix X = separable_data(W, 12, 10);
  const auto plain = spa(X, 3);
  const auto viaid = preconditioned_spa(X, 3, PrecondKind::Identity);
  CHECK(plain.indices == viaid.indices);
}

TEST_CASE("two_by_three: preconditioning rescues SPA") {
  const auto inst = make_two_by_three(10.0, 0.05);
  const auto plain = preconditioned_spa(inst.X_noisy, 2, PrecondKind::Identity);
  CHECK(plain.indices[0] == 2); // failure mode
  for (PrecondKind kind :
       {PrecondKind::Sdp, PrecondKind::PreWhiten, PrecondKind::SpaBased}) {
    auto res = preconditioned_spa(inst.X_noisy, 2, kind);
    std::sort(res.indices.begin(), res.indices.end());
    CHECK(res.indices == IndexList{0, 1});
  }
}

TEST_CASE("two_by_three at k=1000, delta=0.1: all preconditioners recover") {
  const auto inst = make_two_by_three(1000.0, 0.1);
  for (PrecondKind kind :
       {PrecondKind::Sdp, PrecondKind::PreWhiten, PrecondKind::SpaBased}) {
    auto res = preconditioned_spa(inst.X_noisy, 2, kind);
    std::sort(res.indices.begin(), res.indices.end());
    CHECK(res.indices == IndexList{0, 1});
  }
}

TEST_CASE("noiseless exactness across kinds and generators") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto inst = make_middle_points(9, 5, 0.0, seed);
    for (PrecondKind kind : {PrecondKind::Identity, PrecondKind::Sdp,
                             PrecondKind::PreWhiten, PrecondKind::SpaBased}) {
      auto res = preconditioned_spa(inst.X_noisy, 5, kind);
      std::sort(res.indices.begin(), res.indices.end());
      CHECK(res.indices == inst.pure_indices);
    }
  }
}

TEST_CASE("pre-whitening conditioning identity: kappa(QW) = kappa([I,H'])") {
  const Index r = 4;
  const Matrix W = random_square_W(r, 13);
  Matrix H;
  const Matrix X = separable_data(W, 18, 14, &H);
  const auto pc = prewhiten(X, r);
  CHECK(condition_number(pc.Q * W) ==
        doctest::Approx(condition_number(H)).epsilon(1e-8));
}

TEST_CASE("adversarial single-endmember case: kappa(QW) = sqrt(1+n-r)") {
  const Index r = 3, n = 40;
  const Matrix W = random_square_W(r, 15);
  Matrix H = Matrix::Zero(r, n);
  H.leftCols(r) = Matrix::Identity(r, r);
  for (Index j = r; j < n; ++j)
    H(1, j) = 1.0;
  const Matrix X = W * H;
  const auto pw = prewhiten(X, r);
  CHECK(condition_number(pw.Q * W) ==
        doctest::Approx(std::sqrt(1.0 + n - r)).epsilon(1e-8));
  // SPA-based preconditioning is immune to the hostile abundances.
  const auto sp = spa_precondition(X, r, r);
  CHECK(condition_number(sp.Q * W) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("noisy pre-whitening respects the perturbation bound") {
  const Index r = 4;
  const Matrix W = random_square_W(r, 17);
  Matrix H;
  Matrix X = separable_data(W, 16, 18, &H);
  const Index n = X.cols();
  Rng rng(19);
  Matrix N(r, n);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < n; ++j)
      N(i, j) = rng.gaussian();
  N *= 0.02 / N.norm() * W.norm();
  const Matrix noisy = X + N;
  const double delta_prime =
      Eigen::BDCSVD<Matrix>(W.inverse() * N).singularValues()[0];
  REQUIRE(delta_prime < 1.0);
  const auto pw = prewhiten(noisy, r);
  CHECK(condition_number(pw.Q * W) <=
        prewhiten_kappa_bound(n, r, delta_prime) + 1e-6);
}

TEST_CASE("SDP conditioning bound under admissible noise") {
  const Index r = 3;
  const Matrix W = random_square_W(r, 21);
  Matrix X = separable_data(W, 12, 22);
  const double sigma_min = Eigen::BDCSVD<Matrix>(W).singularValues()[r - 1];
  const double eps = 0.5 * sigma_min / (8.0 * r * std::sqrt(double(r)));
  Rng rng(23);
  Matrix noisy = X;
  for (Index j = 0; j < X.cols(); ++j) {
    Vector dir(r);
    for (Index i = 0; i < r; ++i)
      dir[i] = rng.gaussian();
    noisy.col(j) += eps * rng.uniform() * dir.normalized();
  }
  PrecondOptions opts;
  opts.alpha_target = 0.99;
  opts.active_set = false;
  const auto pc = sdp_precondition(noisy, r, opts);
  const double kqw = condition_number(pc.Q * W);
  CHECK(kqw * kqw <= 12.0 / *pc.cert);
}

TEST_CASE("spa_precondition p and depth parameters") {
  const Index r = 3;
  const Matrix W = random_square_W(r, 25);
  const Matrix X = separable_data(W, 15, 26);
  CHECK_THROWS_AS(spa_precondition(X, r, r - 1), std::invalid_argument);
  CHECK_THROWS_AS(spa_precondition(X, r, X.rows() + 1), std::invalid_argument);
  const auto deep = spa_precondition(X, r, r, 2);
  CHECK(condition_number(deep.Q * W) == doctest::Approx(1.0).epsilon(1e-8));
  // p > r on a taller ambient space: lift through a full-column-rank map.
  Rng rng(27);
  Matrix L(r + 3, r);
  for (Index i = 0; i < L.rows(); ++i)
    for (Index j = 0; j < r; ++j)
      L(i, j) = rng.gaussian();
  const auto wide = spa_precondition(L * X, r, r + 2);
  CHECK(wide.Q.rows() == r);
  CHECK(condition_number(wide.Q * (L * W)) == doctest::Approx(1.0).epsilon(1e-6));
}
