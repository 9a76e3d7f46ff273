#include "presep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace presep {

double condition_number(const Matrix &M) {
  require(M.size() > 0 && M.cwiseAbs().maxCoeff() > 0.0, "M must be nonzero");
  Eigen::BDCSVD<Matrix> svd(M);
  const Vector &s = svd.singularValues();
  const double smax = s[0];
  const double smin = s[s.size() - 1];
  if (smin <= smax * 1e-14)
    return std::numeric_limits<double>::infinity();
  return smax / smin;
}

double kappa_star(Index r, double beta, double gamma) {
  require(r >= 2, "r must be at least 2");
  require(beta >= static_cast<double>(r), "need beta >= r");
  require(gamma > 0.0 && gamma <= 1.0, "need gamma in (0,1]");
  const double g = gamma * std::pow(static_cast<double>(r) / beta, r);
  if (g >= 1.0)
    return 1.0;
  const double s = std::sqrt(1.0 - g);
  return (1.0 + s) / (1.0 - s);
}

DirichletSecondMoment dirichlet_second_moment(const Vector &alpha_in) {
  require(alpha_in.size() >= 1, "alpha must be nonempty");
  require(alpha_in.minCoeff() > 0.0, "alpha entries must be positive");
  Vector alpha = alpha_in;
  DirichletSecondMoment out;
  out.was_sorted = true;
  for (Index i = 0; i + 1 < alpha.size(); ++i)
    if (alpha[i] < alpha[i + 1])
      out.was_sorted = false;
  if (!out.was_sorted)
    std::sort(alpha.data(), alpha.data() + alpha.size(),
              std::greater<double>());
  const double a0 = alpha.sum();
  const double denom = a0 * (a0 + 1.0);
  out.Phi = (Matrix(alpha.asDiagonal()) + alpha * alpha.transpose()) / denom;
  out.u_bound = (alpha[0] + alpha.squaredNorm()) / denom;
  out.l_bound = alpha[alpha.size() - 1] / denom;
  return out;
}

double prewhiten_kappa_bound(Index n, Index r, double delta_prime) {
  require(n >= r && r >= 1, "need n >= r >= 1");
  require(delta_prime >= 0.0 && delta_prime < 1.0,
          "bound vacuous for delta' >= 1");
  return (std::sqrt(1.0 + static_cast<double>(n - r)) + delta_prime) /
         (1.0 - delta_prime);
}

GenerativeKappaBound generative_kappa_bound(double sigma_min_W,
                                            double sigma_max_W,
                                            const Vector &alpha_in,
                                            double sigma_noise) {
  require(sigma_min_W > 0.0 && sigma_max_W >= sigma_min_W,
          "need 0 < sigma_min <= sigma_max");
  require(sigma_noise >= 0.0, "sigma_noise must be nonnegative");
  const auto mom = dirichlet_second_moment(alpha_in);
  const double sn2 = sigma_noise * sigma_noise;
  GenerativeKappaBound out;
  const double kappa_W = sigma_max_W / sigma_min_W;
  out.bound = kappa_W *
              std::sqrt((mom.u_bound * sigma_min_W * sigma_min_W + sn2) /
                        (mom.l_bound * sigma_max_W * sigma_max_W + sn2));
  Vector alpha = alpha_in;
  std::sort(alpha.data(), alpha.data() + alpha.size(), std::greater<double>());
  out.zero_noise_approx =
      std::sqrt((alpha[0] + alpha.squaredNorm()) / alpha[alpha.size() - 1]);
  if ((alpha.array() == alpha[0]).all()) {
    const double beta = alpha[0];
    out.symmetric_closed_form =
        std::sqrt(1.0 + static_cast<double>(alpha.size()) * beta);
  }
  return out;
}

BoundReport spa_error_bound(double kappa_W, double kappa_QW, double epsilon,
                            double sigma_min_W, Index r) {
  require(kappa_W >= 1.0 && kappa_QW >= 1.0, "condition numbers are >= 1");
  require(epsilon >= 0.0 && sigma_min_W > 0.0 && r >= 1,
          "invalid bound inputs");
  BoundReport rep;
  rep.name = "preconditioned_spa_error";
  rep.premise_holds =
      epsilon <= sigma_min_W / (std::sqrt(static_cast<double>(r)) * kappa_QW *
                                kappa_QW * kappa_QW);
  rep.bound_value = epsilon * kappa_W * kappa_QW * kappa_QW * kappa_QW;
  rep.constant_convention = "all O(.) constants taken as 1";
  return rep;
}

double mrsa(const Vector &x, const Vector &y) {
  require(x.size() == y.size() && x.size() >= 2, "need equal-length vectors");
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  const double nx = xc.norm();
  const double ny = yc.norm();
  if (nx == 0.0 || ny == 0.0)
    throw std::invalid_argument("mrsa undefined for constant vectors");
  const double c = std::clamp(xc.dot(yc) / (nx * ny), -1.0, 1.0);
  return 100.0 / M_PI * std::acos(c);
}

// O(n^3) Hungarian algorithm with row/column potentials.
IndexList hungarian_assignment(const Matrix &cost) {
  require(cost.rows() == cost.cols() && cost.rows() >= 1,
          "cost matrix must be square");
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  Vector pot_row = Vector::Zero(n + 1);
  Vector pot_col = Vector::Zero(n + 1);
  IndexList match(static_cast<std::size_t>(n) + 1, 0); // column -> row (1-based)
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    Vector min_v = Vector::Constant(n + 1, inf);
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    IndexList way(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)])
          continue;
        const double cur =
            cost(i0 - 1, j - 1) - pot_row[i0] - pot_col[j];
        if (cur < min_v[j]) {
          min_v[j] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (min_v[j] < delta) {
          delta = min_v[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          pot_row[match[static_cast<std::size_t>(j)]] += delta;
          pot_col[j] -= delta;
        } else {
          min_v[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    while (j0 != 0) {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    }
  }
  IndexList row_to_col(static_cast<std::size_t>(n), -1);
  for (Index j = 1; j <= n; ++j)
    row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] -
                                        1)] = j - 1;
  return row_to_col;
}

RecoveryMetrics recovery_metrics(const ExtractionResult &result,
                                 const NearSeparableInstance &instance) {
  require(instance.has_pure_indices && !instance.pure_indices.empty(),
          "instance has no ground-truth pure pixels");
  const Index r = instance.r();
  RecoveryMetrics out;

  Index hits = 0;
  for (Index k : result.indices)
    if (std::find(instance.pure_indices.begin(), instance.pure_indices.end(),
                  k) != instance.pure_indices.end())
      ++hits;
  out.fraction_identified = static_cast<double>(hits) / static_cast<double>(r);

  double worst = 0.0;
  for (Index j = 0; j < r; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Index k : result.indices)
      best = std::min(best, (instance.W.col(j) - instance.X_noisy.col(k)).norm());
    worst = std::max(worst, best);
  }
  out.max_min_error = worst;

  const Index q = static_cast<Index>(result.indices.size());
  // A column with no direction after mean removal (e.g. an exact midpoint in
  // two dimensions) can never match an endmember; score it as worst case.
  const auto safe_mrsa = [](const Vector &x, const Vector &y) {
    try {
      return mrsa(x, y);
    } catch (const std::invalid_argument &) {
      return 100.0;
    }
  };
  Matrix cost(r, q);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < q; ++i)
      cost(j, i) = safe_mrsa(instance.W.col(j),
                             instance.X_noisy.col(result.indices[static_cast<std::size_t>(i)]));
  if (r == q) {
    const IndexList assign = hungarian_assignment(cost);
    out.mrsa_per_endmember.resize(r);
    for (Index j = 0; j < r; ++j)
      out.mrsa_per_endmember[j] = cost(j, assign[static_cast<std::size_t>(j)]);
  } else {
    // Fewer (or more) extracted columns than endmembers: report the best
    // match per endmember.
    out.mrsa_per_endmember = cost.rowwise().minCoeff();
  }
  out.mrsa_mean = out.mrsa_per_endmember.mean();
  return out;
}

} // namespace presep
