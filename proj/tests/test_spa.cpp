#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "presep/rng.hpp"
#include "presep/separable_model.hpp"
#include "presep/spa.hpp"

using namespace presep;

namespace {

Matrix random_matrix(Index m, Index n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix X(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      X(i, j) = rng.uniform(-1.0, 1.0);
  return X;
}

// Random matrix with orthonormal columns (QR of a Gaussian).
Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix G(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      G(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Matrix> qr(G);
  return Matrix(qr.householderQ()) * Matrix::Identity(rows, cols);
}

} // namespace

TEST_CASE("tie at max norm breaks to the smallest index") {
  Matrix X(2, 3);
  X << 1, 0, 0.5, 0, 1, 0.5;
  const auto res = spa(X, 2);
  CHECK(res.indices == IndexList{0, 1});
  CHECK(res.residual_norms[0] == doctest::Approx(1.0));
  CHECK(res.residual_norms[1] == doctest::Approx(1.0));
  CHECK_FALSE(res.terminated_early);
}

TEST_CASE("two_by_three failure mode: first pick is the mixed column") {
  const auto inst = make_two_by_three(10.0, 0.01);
  const auto res = spa(inst.X_noisy, 2);
  CHECK(res.indices[0] == 2);
}

TEST_CASE("p=1 equals a direct norm scan") {
  for (std::uint64_t seed : {2ULL, 3ULL, 4ULL}) {
    const Matrix X = random_matrix(6, 30, seed);
    Index best = 0;
    for (Index j = 1; j < X.cols(); ++j)
      if (X.col(j).norm() > X.col(best).norm())
        best = j;
    const auto res = spa(X, 1);
    REQUIRE(res.indices.size() == 1);
    CHECK(res.indices[0] == best);
  }
}

TEST_CASE("argument validation") {
  const Matrix X = random_matrix(4, 6, 1);
  CHECK_THROWS_AS(spa(X, 0), std::invalid_argument);
  CHECK_THROWS_AS(spa(X, 5), std::invalid_argument);
  Matrix bad = X;
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(spa(bad, 2), std::invalid_argument);
}

TEST_CASE("permutation equivariance") {
  const Matrix X = random_matrix(5, 12, 7);
  const auto base = spa(X, 4);
  // Reverse the columns; ties do not occur for random data.
  Matrix Xp(X.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j)
    Xp.col(j) = X.col(X.cols() - 1 - j);
  const auto perm = spa(Xp, 4);
  for (std::size_t i = 0; i < base.indices.size(); ++i)
    CHECK(perm.indices[i] == X.cols() - 1 - base.indices[i]);
}

TEST_CASE("rotation invariance: orthonormal U preserves selections") {
  const Matrix X = random_matrix(5, 15, 9);
  const auto base = spa(X, 5);
  for (std::uint64_t seed : {10ULL, 11ULL}) {
    const Matrix U = random_orthonormal(9, 5, seed);
    const auto rotated = spa(U * X, 5);
    CHECK(rotated.indices == base.indices);
  }
}

TEST_CASE("positive scaling invariance") {
  const Matrix X = random_matrix(4, 10, 13);
  const auto base = spa(X, 3);
  for (double c : {0.001, 17.0, 3e6})
    CHECK(spa(c * X, 3).indices == base.indices);
}

TEST_CASE("noiseless separable recovery with strict submixtures") {
  Rng rng(21);
  for (Index r : {3, 6, 10}) {
    const Index m = r + 4;
    const Index n = r + 3 * r;
    Matrix W(m, r);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < r; ++j)
        W(i, j) = rng.uniform();
    Matrix H = Matrix::Zero(r, n);
    H.leftCols(r) = Matrix::Identity(r, r);
    for (Index j = r; j < n; ++j) {
      Vector h(r);
      for (Index i = 0; i < r; ++i)
        h[i] = rng.uniform();
      H.col(j) = 0.9 * h / h.sum(); // 1-norm = 0.9 < 1
    }
    auto res = spa(W * H, r);
    std::sort(res.indices.begin(), res.indices.end());
    IndexList expected(static_cast<std::size_t>(r));
    for (Index j = 0; j < r; ++j)
      expected[static_cast<std::size_t>(j)] = j;
    CHECK(res.indices == expected);
  }
}

TEST_CASE("early termination on a rank-deficient matrix") {
  Matrix X(3, 4);
  Vector a(3);
  a << 1, 2, 3;
  for (Index j = 0; j < 4; ++j)
    X.col(j) = (j + 1.0) * a; // rank one
  const auto res = spa(X, 3);
  CHECK(res.terminated_early);
  CHECK(res.indices.size() == 1);
  CHECK(res.indices[0] == 3);
}

TEST_CASE("incremental norms match a literal projection cascade") {
  // Literal algorithm: maintain the residual matrix explicitly.
  for (std::uint64_t seed : {31ULL, 32ULL}) {
    Matrix X = random_matrix(12, 40, seed);
    const Index p = 12;
    Matrix R = X;
    IndexList literal;
    for (Index k = 0; k < p; ++k) {
      Index best = 0;
      for (Index j = 1; j < R.cols(); ++j)
        if (R.col(j).norm() > R.col(best).norm())
          best = j;
      literal.push_back(best);
      const Vector v = R.col(best);
      R -= v * (v.transpose() * R) / v.squaredNorm();
    }
    CHECK(spa(X, p).indices == literal);
  }
}
