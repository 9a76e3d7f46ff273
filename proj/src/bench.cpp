#include "presep/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "presep/csv.hpp"
#include "presep/mvee.hpp"
#include "presep/rng.hpp"

namespace presep {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> default_delta_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 60; ++i)
    g.push_back(i * 0.01);
  return g;
}

} // namespace

Family family_from_string(const std::string &name) {
  if (name == "two_by_three")
    return Family::TwoByThree;
  if (name == "middle_points")
    return Family::MiddlePoints;
  if (name == "dirichlet")
    return Family::Dirichlet;
  if (name == "csv_input")
    return Family::CsvInput;
  throw std::invalid_argument("unknown family: " + name);
}

std::string to_string(Family family) {
  switch (family) {
  case Family::TwoByThree:
    return "two_by_three";
  case Family::MiddlePoints:
    return "middle_points";
  case Family::Dirichlet:
    return "dirichlet";
  case Family::CsvInput:
    return "csv_input";
  }
  return "?";
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw IoError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  if (j.contains("family"))
    c.family = family_from_string(j["family"].get<std::string>());
  c.k = j.value("k", c.k);
  c.m = j.value("m", c.m);
  c.r = j.value("r", c.r);
  c.n = j.value("n", c.n);
  if (j.contains("alpha")) {
    const auto &a = j["alpha"];
    c.alpha.resize(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
      c.alpha[static_cast<Index>(i)] = a[i].get<double>();
  }
  if (j.contains("file"))
    c.input_file = j["file"].get<std::string>();
  if (j.contains("delta_grid")) {
    c.delta_grid.clear();
    for (const auto &d : j["delta_grid"])
      c.delta_grid.push_back(d.get<double>());
  } else if (j.contains("delta_step")) {
    c.delta_grid.clear();
    const double start = j.value("delta_start", 0.0);
    const double stop = j.value("delta_stop", 0.6);
    const double step = j["delta_step"].get<double>();
    require(step > 0.0, "delta_step must be positive");
    for (int i = 0;; ++i) {
      const double d = start + i * step;
      if (d > stop + 1e-12)
        break;
      c.delta_grid.push_back(d);
    }
  }
  c.trials = j.value("trials", c.trials);
  if (j.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto &a : j["algorithms"])
      c.algorithms.push_back(precond_kind_from_string(a.get<std::string>()));
  }
  c.spa_p = j.value("spa_p", c.spa_p);
  c.base_seed = j.value("base_seed", c.base_seed);
  c.alpha_target = j.value("alpha_target", c.alpha_target);
  if (j.contains("output_dir"))
    c.output_dir = j["output_dir"].get<std::string>();
  c.jobs = j.value("jobs", c.jobs);
  c.svg = j.value("svg", c.svg);
  c.record_wall_time = j.value("record_wall_time", c.record_wall_time);

  if (c.delta_grid.empty())
    c.delta_grid = default_delta_grid();
  require(std::is_sorted(c.delta_grid.begin(), c.delta_grid.end()),
          "delta_grid must be sorted ascending");
  require(c.trials >= 1, "trials must be at least 1");
  require(c.jobs >= 1, "jobs must be at least 1");
  return c;
}

ExperimentConfig
ExperimentConfig::from_json_file(const std::filesystem::path &path) {
  std::ifstream f(path);
  if (!f)
    throw IoError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return from_json_text(buf.str());
}

NearSeparableInstance make_instance(const ExperimentConfig &config,
                                    double delta, std::uint64_t seed) {
  switch (config.family) {
  case Family::TwoByThree:
    return make_two_by_three(config.k, delta);
  case Family::MiddlePoints:
    return make_middle_points(config.m, config.r, delta, seed);
  case Family::Dirichlet: {
    Rng rng(mix_seed(seed, 0x57, 0));
    Matrix W(config.m, config.r);
    for (Index i = 0; i < W.rows(); ++i)
      for (Index j = 0; j < W.cols(); ++j)
        W(i, j) = rng.uniform();
    DirichletParams params;
    params.alpha = config.alpha.size() == config.r
                       ? config.alpha
                       : Vector::Ones(config.r);
    params.sigma_noise = delta; // grid entries are noise stds here
    return make_dirichlet_instance(W, params, config.n, seed);
  }
  case Family::CsvInput:
    throw std::invalid_argument("csv_input has no generator; use unmix");
  }
  throw std::invalid_argument("unknown family");
}

ExperimentReport run_sweep(const ExperimentConfig &config_in) {
  ExperimentConfig config = config_in;
  if (config.delta_grid.empty())
    config.delta_grid = default_delta_grid();
  struct Cell {
    std::size_t delta_index;
    int trial;
    std::size_t algo_index;
  };
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < config.delta_grid.size(); ++d)
    for (int t = 0; t < config.trials; ++t)
      for (std::size_t a = 0; a < config.algorithms.size(); ++a)
        cells.push_back({d, t, a});

  ExperimentReport report;
  report.rows.resize(cells.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size())
        return;
      const Cell &cell = cells[i];
      const double delta = config.delta_grid[cell.delta_index];
      const std::uint64_t seed =
          mix_seed(config.base_seed, cell.delta_index,
                   static_cast<std::uint64_t>(cell.trial));
      const PrecondKind kind = config.algorithms[cell.algo_index];
      SweepRow &row = report.rows[i];
      row.delta = delta;
      row.trial = cell.trial;
      row.algorithm = to_string(kind);
      row.seed = seed;
      try {
        const NearSeparableInstance inst = make_instance(config, delta, seed);
        PrecondOptions opts;
        opts.alpha_target = config.alpha_target;
        opts.p = config.spa_p;
        const auto t0 = std::chrono::steady_clock::now();
        const ExtractionResult res =
            preconditioned_spa(inst.X_noisy, inst.r(), kind, opts);
        const auto t1 = std::chrono::steady_clock::now();
        if (config.record_wall_time)
          row.wall_ms =
              std::chrono::duration<double, std::milli>(t1 - t0).count();
        const RecoveryMetrics metrics = recovery_metrics(res, inst);
        row.fraction_identified = metrics.fraction_identified;
        row.max_min_error = metrics.max_min_error;
        row.mrsa_mean = metrics.mrsa_mean;
      } catch (const std::exception &) {
        row.failed = true;
        row.fraction_identified = std::nan("");
        row.max_min_error = std::nan("");
        row.mrsa_mean = std::nan("");
      }
    }
  };

  if (config.jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < config.jobs; ++t)
      pool.emplace_back(worker);
    for (auto &th : pool)
      th.join();
  }

  report.robustness =
      robustness_from_rows(report.rows, config.delta_grid, config.trials);
  for (const auto &row : report.rows)
    report.total_wall_ms[row.algorithm] += row.wall_ms;
  return report;
}

std::map<std::string, double>
robustness_from_rows(const std::vector<SweepRow> &rows,
                     const std::vector<double> &delta_grid, int trials) {
  // algorithm -> delta -> number of perfect trials
  std::map<std::string, std::map<double, int>> perfect;
  std::map<std::string, double> out;
  for (const auto &row : rows) {
    out.emplace(row.algorithm, 0.0);
    if (!row.failed && row.fraction_identified == 1.0)
      perfect[row.algorithm][row.delta] += 1;
  }
  for (auto &[algo, robustness] : out) {
    for (double delta : delta_grid)
      if (perfect[algo][delta] == trials)
        robustness = std::max(robustness, delta);
  }
  return out;
}

std::string ExperimentReport::report_csv() const {
  std::string out = "delta,trial,algorithm,fraction_identified,max_min_error,"
                    "mrsa_mean,wall_ms,seed\n";
  for (const auto &row : rows) {
    out += fmt(row.delta);
    out += ',' + std::to_string(row.trial);
    out += ',' + row.algorithm;
    out += ',' + fmt(row.fraction_identified);
    out += ',' + fmt(row.max_min_error);
    out += ',' + fmt(row.mrsa_mean);
    out += ',' + fmt(row.wall_ms);
    out += ',' + std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

std::string ExperimentReport::summary_csv() const {
  std::string out = "algorithm,robustness,total_wall_ms\n";
  for (const auto &[algo, rob] : robustness) {
    out += algo + ',' + fmt(rob) + ',' +
           fmt(total_wall_ms.count(algo) ? total_wall_ms.at(algo) : 0.0) +
           '\n';
  }
  return out;
}

std::string
ExperimentReport::svg_chart(const std::vector<double> &delta_grid) const {
  // Mean fraction identified vs delta, one polyline per algorithm.
  constexpr int W = 640, H = 420, L = 60, B = 40, T = 20, R = 20;
  const double dmax =
      delta_grid.empty() ? 1.0 : std::max(delta_grid.back(), 1e-12);
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  for (const auto &row : rows)
    if (!row.failed) {
      auto &[sum, count] = acc[row.algorithm][row.delta];
      sum += row.fraction_identified;
      ++count;
    }
  static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#8c564b"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
      << "' height='" << H << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<line x1='" << L << "' y1='" << H - B << "' x2='" << W - R
      << "' y2='" << H - B << "' stroke='black'/>\n"
      << "<line x1='" << L << "' y1='" << T << "' x2='" << L << "' y2='"
      << H - B << "' stroke='black'/>\n"
      << "<text x='" << (W / 2) << "' y='" << H - 8
      << "' font-size='12' text-anchor='middle'>delta</text>\n"
      << "<text x='14' y='" << (H / 2)
      << "' font-size='12' transform='rotate(-90 14 " << (H / 2)
      << ")' text-anchor='middle'>fraction identified</text>\n";
  int ci = 0;
  for (const auto &[algo, by_delta] : acc) {
    const char *color = colors[ci % 5];
    svg << "<polyline fill='none' stroke='" << color << "' points='";
    for (double delta : delta_grid) {
      auto it = by_delta.find(delta);
      if (it == by_delta.end() || it->second.second == 0)
        continue;
      const double frac = it->second.first / it->second.second;
      const double x = L + delta / dmax * (W - L - R);
      const double y = (H - B) - frac * (H - B - T);
      svg << x << ',' << y << ' ';
    }
    svg << "'/>\n<text x='" << (L + 8) << "' y='" << (T + 14 + 16 * ci)
        << "' font-size='12' fill='" << color << "'>" << algo << "</text>\n";
    ++ci;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string BoundsSuiteResult::csv() const {
  std::string out =
      "name,premise_holds,bound_value,measured_value,constant_convention\n";
  for (const auto &rep : reports)
    out += rep.name + ',' + (rep.premise_holds ? "1" : "0") + ',' +
           fmt(rep.bound_value) + ',' + fmt(rep.measured_value) + ',' +
           rep.constant_convention + '\n';
  return out;
}

namespace {

// Random separable instance with m = r and noise within the approximation
// theory's admissible level.
NearSeparableInstance random_square_separable(Index r, std::uint64_t seed,
                                              double noise_scale) {
  Rng rng(seed);
  NearSeparableInstance inst;
  inst.W.resize(r, r);
  for (;;) {
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j)
        inst.W(i, j) = rng.uniform();
    Eigen::BDCSVD<Matrix> svd(inst.W);
    if (svd.singularValues()[r - 1] > 1e-3)
      break;
  }
  const Index n_mixed = 2 * r;
  const Index n = r + n_mixed;
  inst.H = Matrix::Zero(r, n);
  inst.H.leftCols(r) = Matrix::Identity(r, r);
  for (Index j = r; j < n; ++j) {
    Vector h(r);
    for (Index i = 0; i < r; ++i)
      h[i] = rng.uniform();
    inst.H.col(j) = h / (h.sum() + rng.uniform()); // 1-norm strictly < 1
  }
  Eigen::BDCSVD<Matrix> svd(inst.W);
  const double sigma_min = svd.singularValues()[r - 1];
  const double eps =
      noise_scale * sigma_min /
      (8.0 * static_cast<double>(r) * std::sqrt(static_cast<double>(r)));
  inst.N.resize(r, n);
  for (Index j = 0; j < n; ++j) {
    Vector dir(r);
    for (Index i = 0; i < r; ++i)
      dir[i] = rng.gaussian();
    inst.N.col(j) = eps * rng.uniform() * dir.normalized();
  }
  inst.X_noisy = inst.W * inst.H + inst.N;
  inst.pure_indices.resize(static_cast<std::size_t>(r));
  for (Index j = 0; j < r; ++j)
    inst.pure_indices[static_cast<std::size_t>(j)] = j;
  inst.epsilon = eps;
  inst.seed = seed;
  inst.generator = "random_square_separable";
  inst.validate();
  return inst;
}

} // namespace

BoundsSuiteResult run_bounds_suite(const ExperimentConfig &config) {
  BoundsSuiteResult out;
  const Index r = std::min<Index>(config.r, 8);
  const std::string exact = "exact bound";

  for (int t = 0; t < std::min(config.trials, 20); ++t) {
    const std::uint64_t seed = mix_seed(config.base_seed, 0xb0, t);
    const auto inst = random_square_separable(r, seed, 0.9);
    const auto sol = solve_mvee(inst.X_noisy,
                                {.alpha_target = config.alpha_target});
    const Matrix C = inst.W.transpose() * sol.A * inst.W;
    Eigen::BDCSVD<Matrix> svdW(inst.W);
    const double sigma_min = svdW.singularValues()[r - 1];

    BoundReport kc;
    kc.name = "approx_solution_kappa(C)<=12/alpha";
    kc.premise_holds =
        inst.epsilon <=
        sigma_min / (8.0 * static_cast<double>(r) * std::sqrt(static_cast<double>(r)));
    kc.bound_value = 12.0 / sol.alpha_cert;
    kc.measured_value = condition_number(C);
    kc.constant_convention = exact;
    out.reports.push_back(kc);

    // Lower bound on det(C); normalized to the measured <= bound direction
    // by putting the determinant on the bound side.
    BoundReport det;
    det.name = "det(C)>=alpha*(1+eps/smin)^-2r";
    det.premise_holds = true;
    det.measured_value =
        sol.alpha_cert * std::pow(1.0 + inst.epsilon / sigma_min,
                                  -2.0 * static_cast<double>(r));
    det.bound_value = C.determinant();
    det.constant_convention = exact;
    out.reports.push_back(det);

    BoundReport tr;
    tr.name = "trace(C)<=r+1";
    tr.premise_holds = kc.premise_holds;
    tr.bound_value = static_cast<double>(r) + 1.0 + 1e-6;
    tr.measured_value = C.trace();
    tr.constant_convention = exact;
    out.reports.push_back(tr);
  }

  // Pre-whitening worst case: all mixed pixels on one endmember.
  for (Index n : {Index{50}, Index{200}}) {
    Rng rng(mix_seed(config.base_seed, 0xad, static_cast<std::uint64_t>(n)));
    Matrix W(r, r);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j)
        W(i, j) = rng.uniform() + (i == j ? 1.0 : 0.0);
    Matrix H = Matrix::Zero(r, n);
    H.leftCols(r) = Matrix::Identity(r, r);
    for (Index j = r; j < n; ++j)
      H(0, j) = 1.0;
    const Matrix X = W * H;
    const auto pw = prewhiten(X, r);
    BoundReport worst;
    worst.name = "prewhiten_worst_case_kappa=sqrt(1+n-r)";
    worst.premise_holds = true;
    worst.bound_value = prewhiten_kappa_bound(n, r, 0.0) + 1e-6;
    worst.measured_value = condition_number(pw.Q * W);
    worst.constant_convention = exact;
    out.reports.push_back(worst);
  }

  // Dirichlet second-moment eigenvalue bounds.
  {
    Rng rng(mix_seed(config.base_seed, 0xd1, 0));
    for (int t = 0; t < 10; ++t) {
      Vector alpha(r);
      for (Index i = 0; i < r; ++i)
        alpha[i] = 0.1 + 3.0 * rng.uniform();
      const auto mom = dirichlet_second_moment(alpha);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(mom.Phi);
      BoundReport up;
      up.name = "dirichlet_lambda_max<=u";
      up.premise_holds = true;
      up.bound_value = mom.u_bound + 1e-12;
      up.measured_value = eig.eigenvalues().maxCoeff();
      up.constant_convention = exact;
      out.reports.push_back(up);
      BoundReport lo;
      lo.name = "dirichlet_l<=lambda_min";
      lo.premise_holds = true;
      lo.bound_value = eig.eigenvalues().minCoeff() + 1e-12;
      lo.measured_value = mom.l_bound;
      lo.constant_convention = exact;
      out.reports.push_back(lo);
    }
  }

  for (const auto &rep : out.reports)
    if (!rep.holds())
      out.all_hold = false;
  return out;
}

UnmixResult unmix(const Matrix &X, Index r, PrecondKind kind,
                  const PrecondOptions &opts, const Matrix *ground_truth_W) {
  require(r >= 1 && r <= std::min(X.rows(), X.cols()),
          "r must be in [1, min(m,n)]");
  UnmixResult out;
  out.extraction = preconditioned_spa(X, r, kind, opts);
  const Index q = static_cast<Index>(out.extraction.indices.size());
  out.endmembers.resize(X.rows(), q);
  for (Index i = 0; i < q; ++i)
    out.endmembers.col(i) =
        X.col(out.extraction.indices[static_cast<std::size_t>(i)]);
  if (ground_truth_W) {
    require(ground_truth_W->rows() == X.rows(),
            "ground truth row dimension mismatch");
    const Index rt = ground_truth_W->cols();
    Matrix cost(rt, q);
    for (Index j = 0; j < rt; ++j)
      for (Index i = 0; i < q; ++i)
        cost(j, i) = mrsa(ground_truth_W->col(j), out.endmembers.col(i));
    if (rt == q) {
      const IndexList assign = hungarian_assignment(cost);
      out.mrsa_rows.resize(rt);
      for (Index j = 0; j < rt; ++j)
        out.mrsa_rows[j] = cost(j, assign[static_cast<std::size_t>(j)]);
    } else {
      out.mrsa_rows = cost.rowwise().minCoeff();
    }
    out.has_mrsa = true;
  }
  return out;
}

} // namespace presep
