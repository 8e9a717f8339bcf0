// Benchmark driver: factor the model problems and print one CSV row per run.
//
//   hifde_bench --example 1 --algo hifde --n 128 --n 256 --eps 1e-6 --eps 1e-9

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hifde/bench.hpp"
#include "hifde/grid.hpp"
#include "hifde/partition.hpp"

namespace {

void dump_inputs(const hifde::BenchConfig& cfg, const std::string& matrix_path,
                 const std::string& field_path, const std::string& cells_path) {
  const hifde::ProblemSpec prob =
      hifde::make_problem(cfg.example_id, cfg.n, cfg.leaf_m, cfg.seed, cfg.kappa);
  if (!field_path.empty()) {
    std::ofstream out(field_path);
    hifde::write_field_csv(out, prob.grid, prob.field);
  }
  const hifde::SparseSymMatrix a = hifde::assemble(prob.grid, prob.field);
  if (!matrix_path.empty()) hifde::write_matrix_market(matrix_path, a);
  if (!cells_path.empty()) {
    // level-0 interior cells and interfaces of the initial matrix
    std::ofstream out(cells_path);
    hifde::write_cells_csv_header(out);
    hifde::DofState state(a.order());
    hifde::write_cells_csv(out, hifde::interior_cells(prob.grid, 0, state));
    const auto kind = prob.grid.dim == 2 ? hifde::CellKind::kEdge
                                         : hifde::CellKind::kFace;
    hifde::write_cells_csv(
        out, hifde::interface_cells(prob.grid, 0, state, kind,
                                    hifde::LevelTag{0, 1, 2}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multifrontal and hierarchical interpolative factorization "
               "benchmarks"};

  int example = 1;
  std::string algo = "hifde";
  int dim = 0;
  std::vector<int> sizes{64};
  std::vector<double> tolerances{1e-6};
  double kappa = 0.0;
  std::vector<std::uint64_t> seeds{0};
  bool spd = false;
  bool indef = false;
  int leaf_m = 4;
  int skip_levels = -1;
  std::string out_path;
  std::string export_path;
  bool verify = false;
  std::string matrix_path, field_path, cells_path;

  app.add_option("--example", example, "Example 1-6")
      ->check(CLI::Range(1, 6));
  app.add_option("--algo", algo, "mf, hifde or hifde3x")
      ->check(CLI::IsMember({"mf", "hifde", "hifde2", "hifde3", "hifde3x"}));
  app.add_option("--dim", dim, "Expected dimension (checked against example)")
      ->check(CLI::IsMember({2, 3}));
  app.add_option("--n", sizes, "Grid size, repeat for a sweep")
      ->expected(1, -1);
  app.add_option("--eps", tolerances, "Compression tolerance, repeatable")
      ->expected(1, -1);
  auto* kappa_opt =
      app.add_option("--kappa", kappa, "Wavelengths across the domain");
  app.add_option("--seed", seeds, "Seed for fields and right-hand sides, repeatable")
      ->expected(1, -1);
  auto* spd_flag = app.add_flag("--spd", spd, "Cholesky-based factorization");
  auto* indef_flag =
      app.add_flag("--indef", indef, "Pivoted LDL for indefinite problems");
  spd_flag->excludes(indef_flag);
  app.add_option("--leaf-m", leaf_m, "Leaf cell width in grid units")
      ->check(CLI::PositiveNumber);
  app.add_option("--skip-levels", skip_levels,
                 "Levels without (edge) skeletonization");
  app.add_option("--out", out_path, "CSV output path (default stdout)");
  app.add_option("--export-factor", export_path,
                 "Write the factor of the last run to this file");
  app.add_flag("--verify", verify, "Dense check of the factor for N <= 400");
  app.add_option("--dump-matrix", matrix_path, "Matrix Market file of A");
  app.add_option("--dump-field", field_path, "CSV of the coefficient samples");
  app.add_option("--dump-cells", cells_path, "CSV of level-0 cell assignment");

  CLI11_PARSE(app, argc, argv);

  try {
    hifde::apply_thread_limit_from_env();
    if (dim != 0 && dim != hifde::example_dim(example)) {
      throw std::invalid_argument("example " + std::to_string(example) +
                                  " is " +
                                  std::to_string(hifde::example_dim(example)) +
                                  "D");
    }
    std::vector<hifde::BenchConfig> configs;
    const auto parsed = hifde::parse_algorithm(algo);
    const bool uses_eps = parsed != hifde::Algorithm::kMF;
    for (int n : sizes) {
      for (std::size_t e = 0; e < (uses_eps ? tolerances.size() : 1); ++e) {
        for (std::uint64_t seed : seeds) {
          hifde::BenchConfig cfg;
          cfg.example_id = example;
          cfg.algo = parsed;
          cfg.n = n;
          cfg.eps = tolerances[e];
          if (*kappa_opt) cfg.kappa = kappa;
          cfg.seed = seed;
          if (spd) cfg.spd = true;
          if (indef) cfg.spd = false;
          cfg.leaf_m = leaf_m;
          cfg.skip_levels = skip_levels;
          cfg.verify = verify;
          configs.push_back(cfg);
        }
      }
    }
    if (!export_path.empty() && !configs.empty()) {
      configs.back().export_factor = export_path;
    }
    if (!matrix_path.empty() || !field_path.empty() || !cells_path.empty()) {
      dump_inputs(configs.front(), matrix_path, field_path, cells_path);
    }

    bool ok = false;
    if (out_path.empty()) {
      ok = hifde::run_sweep(configs, std::cout);
    } else {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot open " + out_path);
      ok = hifde::run_sweep(configs, out);
    }
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
