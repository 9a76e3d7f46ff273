#include "presep/mvee.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include "presep/spa.hpp"

namespace presep {

namespace {

Index first_deficient_dimension(const Matrix &X) {
  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  return qr.rank();
}

// Cholesky of M = X diag(u) X'; throws RankError naming the deficient
// dimension when M is singular.
Eigen::LLT<Matrix> factorize(const Matrix &X, const Vector &u) {
  const Matrix M =
      X * u.asDiagonal() * X.transpose();
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success)
    throw RankError("design matrix M(u) is singular; data rank " +
                        std::to_string(first_deficient_dimension(X)) + " < " +
                        std::to_string(X.rows()),
                    first_deficient_dimension(X));
  return llt;
}

double logdet_from_llt(const Eigen::LLT<Matrix> &llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Vector design_w(const Matrix &Minv, const Matrix &X) {
  return ((Minv * X).cwiseProduct(X)).colwise().sum().transpose();
}

} // namespace

std::pair<double, double> alpha_certificate(const Vector &u, const Matrix &X) {
  const Index r = X.rows();
  require(u.size() == X.cols(), "u length must match columns of X");
  require(u.minCoeff() >= 0.0, "u must be nonnegative");
  require(std::abs(u.sum() - 1.0) <= 1e-9, "u must sum to one");
  const auto llt = factorize(X, u);
  const Matrix Minv = llt.solve(Matrix::Identity(r, r));
  const double gamma = design_w(Minv, X).maxCoeff();
  return {gamma, std::pow(static_cast<double>(r) / gamma, r)};
}

EllipsoidSolution solve_mvee(const Matrix &X, const MveeOptions &opts) {
  const Index r = X.rows();
  const Index n = X.cols();
  require_finite(X, "X");
  require(n >= r, "need at least r columns");
  require(opts.alpha_target > 0.0 && opts.alpha_target < 1.0,
          "alpha_target must be in (0,1)");

  EllipsoidSolution sol;
  sol.u = Vector::Zero(n);

  if (n == r) {
    // Unique exact solution: A = (XX')^-1.
    sol.u.setConstant(1.0 / static_cast<double>(r));
    const auto llt = factorize(X, sol.u);
    const Matrix Minv = llt.solve(Matrix::Identity(r, r));
    sol.gamma = design_w(Minv, X).maxCoeff();
    sol.alpha_cert = std::pow(static_cast<double>(r) / sol.gamma, r);
    sol.A = Minv / sol.gamma;
    sol.A = 0.5 * (sol.A + sol.A.transpose());
    sol.converged = true;
    for (Index j = 0; j < n; ++j)
      sol.active_set.push_back(j);
    sol.logdet_trace.push_back(logdet_from_llt(llt));
    return sol;
  }

  // Seed with the SPA-selected columns, which are linearly independent for
  // full-row-rank data; fall back to a uniform design.
  {
    const auto seed = spa(X, r);
    if (static_cast<Index>(seed.indices.size()) == r) {
      for (Index j : seed.indices)
        sol.u[j] = 1.0 / static_cast<double>(r);
      Eigen::LLT<Matrix> llt(X * sol.u.asDiagonal() * X.transpose());
      if (llt.info() != Eigen::Success)
        sol.u.setZero();
    }
    if (sol.u.sum() == 0.0)
      sol.u.setConstant(1.0 / static_cast<double>(n));
  }

  auto llt = factorize(X, sol.u);
  Matrix Minv = llt.solve(Matrix::Identity(r, r));
  Vector w = design_w(Minv, X);
  double logdet = logdet_from_llt(llt);

  const int refactor_every = 50 * static_cast<int>(r);
  int since_refactor = 0;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    sol.iterations = iter;
    sol.gamma = w.maxCoeff();
    sol.alpha_cert = std::pow(static_cast<double>(r) / sol.gamma, r);
    sol.logdet_trace.push_back(logdet);
    if (opts.trace)
      *opts.trace << iter << ',' << logdet << ',' << sol.gamma << ','
                  << sol.alpha_cert << '\n';
    if (sol.alpha_cert >= opts.alpha_target) {
      sol.converged = true;
      break;
    }

    Index j_add = 0;
    double w_add = -1.0;
    Index j_away = -1;
    double w_away = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (w[j] > w_add) {
        w_add = w[j];
        j_add = j;
      }
      if (sol.u[j] > 0.0 && w[j] < w_away) {
        w_away = w[j];
        j_away = j;
      }
    }
    const double dr = static_cast<double>(r);
    const bool away = (w_add - dr) < (dr - w_away) && j_away >= 0;
    const Index j = away ? j_away : j_add;
    const double wj = w[j];
    double lambda = (wj - dr) / (dr * (wj - 1.0));
    if (away)
      lambda = std::max(lambda, -sol.u[j] / (1.0 - sol.u[j]));
    if (!std::isfinite(lambda) || std::abs(lambda) < 1e-16)
      break; // stalled at the attainable accuracy

    const double c = lambda / (1.0 - lambda + lambda * wj);
    const Vector q = Minv * X.col(j);
    const Vector s = X.transpose() * q;
    Minv = (Minv - c * q * q.transpose()) / (1.0 - lambda);
    w = (w - c * s.cwiseProduct(s)) / (1.0 - lambda);
    logdet += dr * std::log1p(-lambda) +
              std::log1p(lambda / (1.0 - lambda) * wj);
    sol.u *= (1.0 - lambda);
    sol.u[j] += lambda;
    if (sol.u[j] < 1e-15)
      sol.u[j] = 0.0;

    if (++since_refactor >= refactor_every) {
      since_refactor = 0;
      llt = factorize(X, sol.u);
      Minv = llt.solve(Matrix::Identity(r, r));
      w = design_w(Minv, X);
      logdet = logdet_from_llt(llt);
    }
  }

  // Recompute the certificate from scratch so it is honest regardless of
  // incremental-update drift.
  llt = factorize(X, sol.u);
  Minv = llt.solve(Matrix::Identity(r, r));
  w = design_w(Minv, X);
  sol.gamma = w.maxCoeff();
  sol.alpha_cert = std::pow(static_cast<double>(r) / sol.gamma, r);
  sol.A = Minv / sol.gamma;
  sol.A = 0.5 * (sol.A + sol.A.transpose());
  for (Index j = 0; j < n; ++j)
    if (sol.u[j] > 0.0)
      sol.active_set.push_back(j);
  return sol;
}

EllipsoidSolution active_set_solve(const Matrix &X, const MveeOptions &opts) {
  const Index r = X.rows();
  const Index n = X.cols();
  require_finite(X, "X");
  require(n >= r, "need at least r columns");
  const Index cap = r * (r + 1) / 2 + 10;

  std::set<Index> working;
  for (Index j : spa(X, std::min(n, r)).indices)
    working.insert(j);

  EllipsoidSolution sol;
  for (int outer = 0; outer < 100; ++outer) {
    IndexList cols(working.begin(), working.end());
    Matrix Xw(r, static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
      Xw.col(static_cast<Index>(i)) = X.col(cols[i]);
    EllipsoidSolution sub = solve_mvee(Xw, opts);

    // Certificate against the full constraint set.
    Vector u_full = Vector::Zero(n);
    for (std::size_t i = 0; i < cols.size(); ++i)
      u_full[cols[i]] = sub.u[static_cast<Index>(i)];
    const auto llt = factorize(X, u_full);
    const Matrix Minv = llt.solve(Matrix::Identity(r, r));
    const Vector w = design_w(Minv, X);
    const double gamma_full = w.maxCoeff();

    sol = sub;
    sol.u = u_full;
    sol.gamma = gamma_full;
    sol.alpha_cert = std::pow(static_cast<double>(r) / gamma_full, r);
    sol.A = Minv / gamma_full;
    sol.A = 0.5 * (sol.A + sol.A.transpose());
    sol.active_set.clear();
    for (Index j = 0; j < n; ++j)
      if (u_full[j] > 0.0)
        sol.active_set.push_back(j);

    // Violations of x'Ax <= 1 under the subproblem scaling.
    IndexList violated;
    for (Index j = 0; j < n; ++j)
      if (w[j] / sub.gamma > 1.0 + 1e-9)
        violated.push_back(j);
    if (violated.empty())
      return sol;

    std::sort(violated.begin(), violated.end(),
              [&](Index a, Index b) { return w[a] > w[b]; });
    std::set<Index> next(sol.active_set.begin(), sol.active_set.end());
    bool added = false;
    for (Index j : violated) {
      if (static_cast<Index>(next.size()) >= cap && added)
        break;
      added |= next.insert(j).second;
    }
    if (!added)
      return sol;
    working = std::move(next);
  }
  return sol;
}

} // namespace presep
