#pragma once

#include <iosfwd>
#include <utility>

#include "presep/types.hpp"

namespace presep {

// Minimum-volume origin-centered ellipsoid {x : x'Ax <= 1} enclosing the
// columns of X, with a weak-duality approximation certificate from the
// D-optimal design dual: for the design weights u on the simplex and
// M(u) = sum_j u_j x_j x_j', A = M(u)^-1 / gamma with
// gamma = max_j x_j' M(u)^-1 x_j is primal feasible and satisfies
// det(A) >= (r/gamma)^r det(A*).
struct EllipsoidSolution {
  Matrix A;
  Vector u;
  double gamma = 0.0;
  double alpha_cert = 0.0;
  int iterations = 0;
  bool converged = false;
  IndexList active_set;             // columns with u_j > 0
  std::vector<double> logdet_trace; // log det M(u) per iteration (ascending)
};

struct MveeOptions {
  double alpha_target = 0.99;
  int max_iters = 200000;
  std::ostream *trace = nullptr; // CSV rows: iter,logdet,gamma,alpha_cert
};

// Frank-Wolfe/Khachiyan ascent on log det M(u) with Wolfe-Atwood away steps
// and exact line search; M(u)^-1 maintained by rank-1 updates with periodic
// refactorization. Initial design: uniform on the SPA-selected columns.
EllipsoidSolution solve_mvee(const Matrix &X, const MveeOptions &opts = {});

// gamma = max_j x_j' M(u)^-1 x_j and alpha = (r/gamma)^r for a given design.
std::pair<double, double> alpha_certificate(const Vector &u, const Matrix &X);

// Outer active-set loop: solve on a working set seeded by SPA, add the most
// violated constraints, repeat until all n constraints hold. The returned
// certificate is evaluated against the full column set.
EllipsoidSolution active_set_solve(const Matrix &X,
                                   const MveeOptions &opts = {});

} // namespace presep
