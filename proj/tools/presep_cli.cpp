// Benchmark CLI: generate near-separable instances, run noise sweeps,
// evaluate the bound suites, and unmix user-supplied CSV matrices.
//
// Exit codes: 0 ok, 1 usage, 2 assertion-grade bound violation, 3 I/O.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "presep/bench.hpp"
#include "presep/csv.hpp"
#include "presep/rng.hpp"

namespace fs = std::filesystem;
using namespace presep;

namespace {

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw IoError("cannot open for writing: " + path.string());
  f << text;
  if (!f)
    throw IoError("write failed: " + path.string());
}

ExperimentConfig load_config(const std::string &config_path,
                             const std::string &out_dir, int jobs, bool svg) {
  ExperimentConfig config = config_path.empty()
                                ? ExperimentConfig{}
                                : ExperimentConfig::from_json_file(config_path);
  if (!out_dir.empty())
    config.output_dir = out_dir;
  if (jobs > 0)
    config.jobs = jobs;
  if (svg)
    config.svg = true;
  return config;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Preconditioned pure-pixel search benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  bool svg = false;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--jobs", jobs, "Worker threads");
  app.add_flag("--svg", svg, "Also emit an SVG line chart");

  auto *gen = app.add_subcommand("gen", "Emit one instance to a directory");
  std::string gen_family = "middle_points";
  double gen_k = 10.0, gen_delta = 0.0;
  std::int64_t gen_m = 40, gen_r = 20, gen_n = 1000;
  std::uint64_t gen_seed = 1;
  double gen_sigma = 0.0;
  gen->add_option("--family", gen_family,
                  "two_by_three | middle_points | dirichlet");
  gen->add_option("--k", gen_k, "two_by_three parameter k");
  gen->add_option("--delta", gen_delta, "Noise level");
  gen->add_option("--m", gen_m, "Rows");
  gen->add_option("--r", gen_r, "Endmembers");
  gen->add_option("--n", gen_n, "Samples (dirichlet)");
  gen->add_option("--sigma", gen_sigma, "Noise std (dirichlet)");
  gen->add_option("--seed", gen_seed, "Seed");

  auto *sweep = app.add_subcommand("sweep", "Run a noise sweep");
  auto *bounds = app.add_subcommand("bounds", "Run the bound-report suite");

  auto *unmix_cmd = app.add_subcommand("unmix", "Unmix a CSV matrix");
  std::string unmix_file, unmix_truth, unmix_algo = "SPA";
  std::int64_t unmix_r = 0;
  unmix_cmd->add_option("file", unmix_file, "Input CSV matrix (m x n)")
      ->required();
  unmix_cmd->add_option("--r", unmix_r, "Number of endmembers")->required();
  unmix_cmd->add_option("--algorithm", unmix_algo,
                        "SPA | SDP-SPA | PW-SPA | SPA-SPA");
  unmix_cmd->add_option("--truth", unmix_truth,
                        "Ground-truth endmember CSV (m x r)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    const ExperimentConfig config =
        load_config(config_path, out_dir, jobs, svg);
    fs::create_directories(config.output_dir);

    if (gen->parsed()) {
      ExperimentConfig gc = config;
      gc.family = family_from_string(gen_family);
      gc.k = gen_k;
      gc.m = gen_m;
      gc.r = gen_r;
      gc.n = gen_n;
      const double level =
          gc.family == Family::Dirichlet ? gen_sigma : gen_delta;
      const auto inst = make_instance(gc, level, gen_seed);
      save_instance(inst, config.output_dir);
      std::cout << "wrote instance (" << inst.m() << "x" << inst.n() << ", r="
                << inst.r() << ") to " << config.output_dir.string() << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      const ExperimentReport report = run_sweep(config);
      write_text(config.output_dir / "report.csv", report.report_csv());
      write_text(config.output_dir / "summary.csv", report.summary_csv());
      if (config.svg)
        write_text(config.output_dir / "sweep.svg",
                   report.svg_chart(config.delta_grid));
      std::cout << report.summary_csv();
      return 0;
    }

    if (bounds->parsed()) {
      const BoundsSuiteResult result = run_bounds_suite(config);
      write_text(config.output_dir / "bounds.csv", result.csv());
      std::cout << result.csv();
      if (!result.all_hold) {
        std::cerr << "assertion-grade bound violated\n";
        return 2;
      }
      return 0;
    }

    if (unmix_cmd->parsed()) {
      const Matrix X = read_csv(unmix_file);
      Matrix truth;
      const bool has_truth = !unmix_truth.empty();
      if (has_truth)
        truth = read_csv(unmix_truth);
      PrecondOptions opts;
      opts.alpha_target = config.alpha_target;
      const UnmixResult result =
          unmix(X, unmix_r, precond_kind_from_string(unmix_algo), opts,
                has_truth ? &truth : nullptr);
      Matrix idx(1, static_cast<Index>(result.extraction.indices.size()));
      for (std::size_t i = 0; i < result.extraction.indices.size(); ++i)
        idx(0, static_cast<Index>(i)) =
            static_cast<double>(result.extraction.indices[i]);
      write_text(config.output_dir / "indices.csv", to_csv(idx));
      write_text(config.output_dir / "endmembers.csv",
                 to_csv(result.endmembers));
      std::cout << "indices:";
      for (Index j : result.extraction.indices)
        std::cout << ' ' << j;
      std::cout << "\n";
      if (result.has_mrsa) {
        std::cout << "endmember,mrsa\n";
        for (Index j = 0; j < result.mrsa_rows.size(); ++j)
          std::cout << j << ',' << result.mrsa_rows[j] << "\n";
        std::cout << "average," << result.mrsa_rows.mean() << "\n";
      }
      return 0;
    }

    std::cerr << "no subcommand\n";
    return 1;
  } catch (const IoError &e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
