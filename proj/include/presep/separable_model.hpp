#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "presep/types.hpp"

namespace presep {

// A generated near-separable problem X_noisy = W*H + N where H = [I_r, H']
// up to column ordering, columns of H nonnegative with 1-norm at most one.
struct NearSeparableInstance {
  Matrix W;        // m x r endmember signatures
  Matrix H;        // r x n abundances
  Matrix N;        // m x n noise
  Matrix X_noisy;  // m x n observed data
  IndexList pure_indices; // columns j with H(:,j) = identity column
  bool has_pure_indices = true; // false for generative families
  double epsilon = 0.0;         // max column 2-norm of N
  std::uint64_t seed = 0;
  std::string generator; // generator id + parameter summary

  Index m() const { return W.rows(); }
  Index r() const { return W.cols(); }
  Index n() const { return H.cols(); }

  // Enforces the construction invariants; throws on violation. Called by
  // every generator.
  void validate() const;
};

struct DirichletParams {
  Vector alpha;             // concentration, all entries > 0
  double sigma_noise = 0.0; // per-coordinate Gaussian noise std
  bool alpha_sorted_nonincreasing() const;
};

// The 2x3 adversarial family: W = [[k+1,k],[k,k+1]], H = [I_2, (0.5,0.5)'],
// N = delta * [-W(:,1), -W(:,2), W*H(:,3)].
NearSeparableInstance make_two_by_three(double k, double delta);

// Middle-points family: W uniform on [0,1], one mixed column 0.5(e_i + e_k)
// per unordered pair, n = r + r(r-1)/2. Noise pushes the mixed columns away
// from the column mean of W: N(:,j) = delta * (X(:,j) - w_bar). By default
// the pure columns stay noiseless; `perturb_pure` applies the same formula
// to them as well.
NearSeparableInstance make_middle_points(Index m, Index r, double delta,
                                         std::uint64_t seed,
                                         bool perturb_pure = false);

// Generative family: H columns i.i.d. Dirichlet(alpha), N columns i.i.d.
// N(0, sigma^2 I). No exact pure pixels at finite n; pure_indices is empty
// and has_pure_indices is false.
NearSeparableInstance make_dirichlet_instance(const Matrix &W,
                                              const DirichletParams &params,
                                              Index n, std::uint64_t seed);

// Serialize to dir/{W,H,N,X}.csv + dir/meta.json; load reverses it.
void save_instance(const NearSeparableInstance &inst,
                   const std::filesystem::path &dir);
NearSeparableInstance load_instance(const std::filesystem::path &dir);

} // namespace presep
