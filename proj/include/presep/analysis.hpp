#pragma once

#include <optional>
#include <string>

#include "presep/separable_model.hpp"
#include "presep/spa.hpp"
#include "presep/types.hpp"

namespace presep {

struct RecoveryMetrics {
  double fraction_identified = 0.0; // |K intersect pure| / r
  double max_min_error = 0.0; // max over endmembers of min column distance
  Vector mrsa_per_endmember;  // optimal one-to-one assignment, in [0,100]
  double mrsa_mean = 0.0;
};

struct BoundReport {
  std::string name;
  bool premise_holds = false;
  double bound_value = 0.0;
  double measured_value = 0.0;
  std::string constant_convention;
  bool holds(double tolerance = 0.0) const {
    return !premise_holds || measured_value <= bound_value + tolerance;
  }
};

// sigma_max / sigma_min; +infinity when sigma_min falls below the relative
// cutoff.
double condition_number(const Matrix &M);

// Closed form for the maximal eigenvalue ratio of an r x r PSD matrix with
// trace <= beta and determinant >= gamma:
// (1 + sqrt(1 - g)) / (1 - sqrt(1 - g)) with g = gamma (r/beta)^r.
double kappa_star(Index r, double beta, double gamma);

struct DirichletSecondMoment {
  Matrix Phi;     // E[h h'] = (D + alpha alpha') / (a0 (a0+1))
  double u_bound; // >= lambda_max(Phi)
  double l_bound; // <= lambda_min(Phi)
  bool was_sorted; // false if alpha had to be sorted internally
};

DirichletSecondMoment dirichlet_second_moment(const Vector &alpha);

// (sqrt(1+n-r) + delta') / (1 - delta').
double prewhiten_kappa_bound(Index n, Index r, double delta_prime);

struct GenerativeKappaBound {
  double bound;            // kappa(W) sqrt((u smin^2 + sn^2)/(l smax^2 + sn^2))
  double zero_noise_approx; // sqrt((alpha_1 + ||alpha||^2) / alpha_r)
  std::optional<double> symmetric_closed_form; // sqrt(1 + r beta) when
                                               // alpha is symmetric
};

GenerativeKappaBound generative_kappa_bound(double sigma_min_W,
                                            double sigma_max_W,
                                            const Vector &alpha,
                                            double sigma_noise);

// Preconditioned SPA noise admissibility and error (all O(.) constants taken
// as 1); trend reporting only, never assertion-grade.
BoundReport spa_error_bound(double kappa_W, double kappa_QW, double epsilon,
                            double sigma_min_W, Index r);

// Mean-removed spectral angle in [0, 100].
double mrsa(const Vector &x, const Vector &y);

// Minimum-cost perfect matching on a square cost matrix; returns the column
// assigned to each row.
IndexList hungarian_assignment(const Matrix &cost);

RecoveryMetrics recovery_metrics(const ExtractionResult &result,
                                 const NearSeparableInstance &instance);

} // namespace presep
