#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hifde/factor.hpp"

namespace hifde {

struct BenchConfig {
  int example_id = 1;
  Algorithm algo = Algorithm::kHifde;
  int n = 64;
  double eps = 1e-6;
  std::optional<double> kappa;
  std::uint64_t seed = 0;
  std::optional<bool> spd;  // default: from the example
  int leaf_m = 4;
  int skip_levels = -1;
  double tol = 1e-12;
  int max_iter = 500;
  std::string export_factor;  // empty: no export
  bool verify = false;        // dense check, only for N <= kVerifyLimit
};

inline constexpr std::int64_t kVerifyLimit = 400;

struct BenchRow {
  int example_id = 0;
  std::string algo;
  int dim = 0;
  int n = 0;
  std::int64_t num_dofs = 0;
  double eps = 0.0;
  std::optional<double> kappa;
  std::uint64_t seed = 0;
  std::int64_t top_size = 0;
  double t_f = 0.0;
  std::size_t m_f = 0;
  double t_a = 0.0;
  double t_s = 0.0;
  double e_a = 0.0;
  double e_s = 0.0;
  int n_i = 0;
  double r_true = 0.0;  // recomputed relative residual of the Krylov solve
  bool estimator_warning = false;
  std::optional<double> e_verify;  // dense ||A - F|| / ||A||
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

// Assembles, factors, times one apply and one solve, estimates e_a and e_s
// and runs CG (SPD) or GMRES (indefinite) preconditioned by the factor.
// Problems during the run are reported in `status`; a bad configuration
// throws std::invalid_argument.
BenchRow run_example(const BenchConfig& cfg);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchRow& row);

// One row per config, streamed as they finish. Returns true iff every row
// is ok.
bool run_sweep(const std::vector<BenchConfig>& configs, std::ostream& out);

// Caps worker threads at HIFDE_NUM_THREADS when set.
void apply_thread_limit_from_env();

}  // namespace hifde
