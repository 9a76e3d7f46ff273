#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "presep/analysis.hpp"
#include "presep/precondition.hpp"
#include "presep/separable_model.hpp"

namespace presep {

enum class Family { TwoByThree, MiddlePoints, Dirichlet, CsvInput };

Family family_from_string(const std::string &name);
std::string to_string(Family family);

// Sweep configuration; defaults reproduce the middle-points protocol
// (m = 40, r = 20, noise levels 0:0.01:0.6, 25 trials).
struct ExperimentConfig {
  Family family = Family::MiddlePoints;
  double k = 10.0; // two_by_three
  Index m = 40;
  Index r = 20;
  Index n = 210;                    // dirichlet sample count
  Vector alpha;                     // dirichlet concentration (default all 1)
  std::filesystem::path input_file; // csv_input
  std::vector<double> delta_grid;   // sorted ascending; default 0:0.01:0.6
  int trials = 25;
  std::vector<PrecondKind> algorithms = {
      PrecondKind::Identity, PrecondKind::Sdp, PrecondKind::PreWhiten,
      PrecondKind::SpaBased};
  Index spa_p = -1; // SPA-SPA extraction count, default r
  std::uint64_t base_seed = 1;
  double alpha_target = 0.99;
  std::filesystem::path output_dir = "out";
  int jobs = 1;
  bool svg = false;
  // When false, the wall_ms column is written as 0 so report.csv is
  // byte-identical across runs.
  bool record_wall_time = true;

  static ExperimentConfig from_json_file(const std::filesystem::path &path);
  static ExperimentConfig from_json_text(const std::string &text);
};

struct SweepRow {
  double delta = 0.0;
  int trial = 0;
  std::string algorithm;
  double fraction_identified = 0.0;
  double max_min_error = 0.0;
  double mrsa_mean = 0.0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
};

struct ExperimentReport {
  std::vector<SweepRow> rows;
  // algorithm -> largest grid delta with perfect recovery in every trial.
  std::map<std::string, double> robustness;
  std::map<std::string, double> total_wall_ms;

  std::string report_csv() const;
  std::string summary_csv() const;
  std::string svg_chart(const std::vector<double> &delta_grid) const;
};

NearSeparableInstance make_instance(const ExperimentConfig &config,
                                    double delta, std::uint64_t seed);

ExperimentReport run_sweep(const ExperimentConfig &config);

// Recomputes the robustness summary from rows alone (the independent check
// the report invariant calls for).
std::map<std::string, double>
robustness_from_rows(const std::vector<SweepRow> &rows,
                     const std::vector<double> &delta_grid, int trials);

struct BoundsSuiteResult {
  std::vector<BoundReport> reports;
  bool all_hold = true;
  std::string csv() const;
};

// Assertion-grade bounds (approximate-solution conditioning, determinant
// and trace bounds, pre-whitening worst case, Dirichlet moment bounds) over
// generated instances.
BoundsSuiteResult run_bounds_suite(const ExperimentConfig &config);

struct UnmixResult {
  ExtractionResult extraction;
  Matrix endmembers;  // selected columns
  Vector mrsa_rows;   // vs. ground truth, when provided
  bool has_mrsa = false;
};

UnmixResult unmix(const Matrix &X, Index r, PrecondKind kind,
                  const PrecondOptions &opts = {},
                  const Matrix *ground_truth_W = nullptr);

} // namespace presep
