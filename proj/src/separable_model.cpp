#include "presep/separable_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "presep/csv.hpp"
#include "presep/rng.hpp"

namespace presep {

void NearSeparableInstance::validate() const {
  require(W.rows() == N.rows() && W.rows() == X_noisy.rows(),
          "row dimension mismatch");
  require(W.cols() == H.rows(), "inner dimension mismatch");
  require(H.cols() == N.cols() && H.cols() == X_noisy.cols(),
          "column dimension mismatch");
  for (Index j = 0; j < H.cols(); ++j) {
    require(H.col(j).minCoeff() >= 0.0, "H has a negative entry");
    require(H.col(j).lpNorm<1>() <= 1.0 + 1e-12,
            "H column 1-norm exceeds one");
  }
  if (has_pure_indices) {
    for (Index k = 0; k < r(); ++k) {
      bool found = false;
      for (Index j : pure_indices)
        if ((H.col(j) - Vector::Unit(r(), k)).lpNorm<Eigen::Infinity>() == 0.0)
          found = true;
      require(found, "missing pure column for endmember " + std::to_string(k));
    }
  }
  double max_col = 0.0;
  for (Index j = 0; j < N.cols(); ++j)
    max_col = std::max(max_col, N.col(j).norm());
  require(max_col <= epsilon * (1.0 + 1e-12) + 1e-300,
          "noise column norm exceeds epsilon");
  require((X_noisy - (W * H + N)).cwiseAbs().maxCoeff() == 0.0,
          "X_noisy is not exactly W*H + N");
}

bool DirichletParams::alpha_sorted_nonincreasing() const {
  for (Index i = 0; i + 1 < alpha.size(); ++i)
    if (alpha[i] < alpha[i + 1])
      return false;
  return true;
}

namespace {

double max_col_norm(const Matrix &m) {
  double v = 0.0;
  for (Index j = 0; j < m.cols(); ++j)
    v = std::max(v, m.col(j).norm());
  return v;
}

} // namespace

NearSeparableInstance make_two_by_three(double k, double delta) {
  require(k >= 0.0, "k must be nonnegative");
  require(delta >= 0.0 && delta < 1.0, "delta must be in [0,1)");
  NearSeparableInstance inst;
  inst.W.resize(2, 2);
  inst.W << k + 1.0, k, k, k + 1.0;
  inst.H.resize(2, 3);
  inst.H << 1.0, 0.0, 0.5, 0.0, 1.0, 0.5;
  const Matrix X = inst.W * inst.H;
  inst.N.resize(2, 3);
  inst.N.col(0) = -delta * inst.W.col(0);
  inst.N.col(1) = -delta * inst.W.col(1);
  inst.N.col(2) = delta * X.col(2);
  inst.X_noisy = inst.W * inst.H + inst.N;
  inst.pure_indices = {0, 1};
  inst.epsilon = max_col_norm(inst.N);
  inst.generator = "two_by_three(k=" + std::to_string(k) +
                   ",delta=" + std::to_string(delta) + ")";
  inst.validate();
  return inst;
}

NearSeparableInstance make_middle_points(Index m, Index r, double delta,
                                         std::uint64_t seed,
                                         bool perturb_pure) {
  require(m >= r, "m must be at least r");
  require(r >= 2, "r must be at least 2 (no pairs otherwise)");
  require(delta >= 0.0, "delta must be nonnegative");
  const Index n = r + r * (r - 1) / 2;
  NearSeparableInstance inst;
  Rng rng(seed);
  inst.W.resize(m, r);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < r; ++j)
      inst.W(i, j) = rng.uniform();
  inst.H = Matrix::Zero(r, n);
  inst.H.leftCols(r) = Matrix::Identity(r, r);
  Index col = r;
  for (Index i = 0; i < r; ++i)
    for (Index k = i + 1; k < r; ++k) {
      inst.H(i, col) = 0.5;
      inst.H(k, col) = 0.5;
      ++col;
    }
  const Matrix X = inst.W * inst.H;
  const Vector w_bar = inst.W.rowwise().mean();
  inst.N = Matrix::Zero(m, n);
  const Index first_noisy = perturb_pure ? 0 : r;
  for (Index j = first_noisy; j < n; ++j)
    inst.N.col(j) = delta * (X.col(j) - w_bar);
  inst.X_noisy = inst.W * inst.H + inst.N;
  inst.pure_indices.resize(static_cast<std::size_t>(r));
  for (Index j = 0; j < r; ++j)
    inst.pure_indices[static_cast<std::size_t>(j)] = j;
  inst.epsilon = max_col_norm(inst.N);
  inst.seed = seed;
  inst.generator = std::string("middle_points[") + kGeneratorId + "]";
  inst.validate();
  return inst;
}

NearSeparableInstance make_dirichlet_instance(const Matrix &W,
                                              const DirichletParams &params,
                                              Index n, std::uint64_t seed) {
  const Index r = W.cols();
  require(params.alpha.size() == r, "alpha length must match W columns");
  require(params.alpha.minCoeff() > 0.0, "alpha entries must be positive");
  require(params.sigma_noise >= 0.0, "sigma_noise must be nonnegative");
  require(n >= r, "need n >= r samples");
  require_finite(W, "W");
  Eigen::ColPivHouseholderQR<Matrix> qr(W);
  require(qr.rank() == r, "W must have full column rank");

  NearSeparableInstance inst;
  inst.W = W;
  Rng rng(seed);
  inst.H.resize(r, n);
  for (Index j = 0; j < n; ++j)
    inst.H.col(j) = rng.dirichlet(params.alpha);
  inst.N.resize(W.rows(), n);
  if (params.sigma_noise > 0.0) {
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < W.rows(); ++i)
        inst.N(i, j) = params.sigma_noise * rng.gaussian();
  } else {
    inst.N.setZero();
  }
  inst.X_noisy = inst.W * inst.H + inst.N;
  inst.has_pure_indices = false; // no exact pure pixels at finite n
  inst.epsilon = max_col_norm(inst.N);
  inst.seed = seed;
  inst.generator = std::string("dirichlet[") + kGeneratorId + "]";
  inst.validate();
  return inst;
}

void save_instance(const NearSeparableInstance &inst,
                   const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  write_csv(dir / "W.csv", inst.W);
  write_csv(dir / "H.csv", inst.H);
  write_csv(dir / "N.csv", inst.N);
  write_csv(dir / "X.csv", inst.X_noisy);
  nlohmann::json meta;
  meta["seed"] = inst.seed;
  meta["epsilon"] = inst.epsilon;
  meta["pure_indices"] = inst.pure_indices;
  meta["has_pure_indices"] = inst.has_pure_indices;
  meta["generator"] = inst.generator;
  std::ofstream f(dir / "meta.json");
  if (!f)
    throw IoError("cannot write " + (dir / "meta.json").string());
  f << meta.dump(2) << "\n";
}

NearSeparableInstance load_instance(const std::filesystem::path &dir) {
  NearSeparableInstance inst;
  inst.W = read_csv(dir / "W.csv");
  inst.H = read_csv(dir / "H.csv");
  inst.N = read_csv(dir / "N.csv");
  inst.X_noisy = read_csv(dir / "X.csv");
  std::ifstream f(dir / "meta.json");
  if (!f)
    throw IoError("cannot read " + (dir / "meta.json").string());
  nlohmann::json meta = nlohmann::json::parse(f);
  inst.seed = meta.value("seed", std::uint64_t{0});
  inst.epsilon = meta.value("epsilon", 0.0);
  inst.has_pure_indices = meta.value("has_pure_indices", true);
  inst.generator = meta.value("generator", "");
  inst.pure_indices.clear();
  for (const auto &j : meta["pure_indices"])
    inst.pure_indices.push_back(j.get<Index>());
  return inst;
}

} // namespace presep
