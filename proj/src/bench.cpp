#include "hifde/bench.hpp"

#include <chrono>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hifde/grid.hpp"
#include "hifde/krylov.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hifde {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void check_config(const BenchConfig& cfg) {
  const int dim = example_dim(cfg.example_id);
  if (cfg.algo == Algorithm::kHifde3x && dim != 3) {
    throw std::invalid_argument("hifde3x runs on 3D examples (4-6) only");
  }
  if (cfg.algo != Algorithm::kMF && !(cfg.eps > 0.0 && cfg.eps < 1.0)) {
    throw std::invalid_argument("eps must lie in (0, 1)");
  }
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n') ? ' ' : c;
  }
  return out + "\"";
}

double dense_verify(const SparseSymMatrix& a, const GeneralizedLDL& f) {
  const Eigen::MatrixXd dense_a = a.to_dense();
  Eigen::MatrixXd dense_f(a.order(), a.order());
  for (Index j = 0; j < a.order(); ++j) {
    dense_f.col(j) = f.apply(Eigen::VectorXd::Unit(a.order(), j));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> sa(dense_a);
  Eigen::JacobiSVD<Eigen::MatrixXd> sd(dense_a - dense_f);
  return sd.singularValues()[0] / sa.singularValues()[0];
}

}  // namespace

BenchRow run_example(const BenchConfig& cfg) {
  check_config(cfg);
  BenchRow row;
  row.example_id = cfg.example_id;
  row.algo = std::string(to_string(cfg.algo));
  row.dim = example_dim(cfg.example_id);
  row.n = cfg.n;
  row.eps = cfg.algo == Algorithm::kMF ? 0.0 : cfg.eps;
  row.seed = cfg.seed;
  const bool indefinite = !example_is_spd(cfg.example_id);
  if (indefinite) {
    row.kappa = cfg.kappa.value_or(default_kappa(cfg.example_id, cfg.n));
  }

  const ProblemSpec prob =
      make_problem(cfg.example_id, cfg.n, cfg.leaf_m, cfg.seed, row.kappa);
  row.num_dofs = prob.grid.num_dofs();

  try {
    const SparseSymMatrix a = assemble(prob.grid, prob.field);
    FactorOptions opts;
    opts.algo = cfg.algo;
    opts.eps = cfg.eps;
    opts.spd = cfg.spd.value_or(!indefinite);
    opts.skip_levels = cfg.skip_levels;
    const GeneralizedLDL f = factorize(a, prob.grid, opts);
    row.top_size = f.metrics.top_size;
    row.t_f = f.metrics.seconds;
    row.m_f = f.metrics.bytes;
    if (!cfg.export_factor.empty()) write_factor(cfg.export_factor, f);

    UniformRng rng(cfg.seed);
    Eigen::VectorXd rhs(a.order());
    for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs[i] = rng.next();

    auto t0 = std::chrono::steady_clock::now();
    [[maybe_unused]] const Eigen::VectorXd fx = f.apply(rhs);
    row.t_a = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    [[maybe_unused]] const Eigen::VectorXd fb = f.apply_inverse(rhs);
    row.t_s = seconds_since(t0);

    const LinearOperator op_a = [&](const Eigen::VectorXd& x) {
      return a.multiply(x);
    };
    const LinearOperator op_f = [&](const Eigen::VectorXd& x) {
      return f.apply(x);
    };
    const LinearOperator op_finv = [&](const Eigen::VectorXd& x) {
      return f.apply_inverse(x);
    };
    const std::uint64_t est_seed = cfg.seed + 1;
    const ErrorEstimate ea = estimate_apply_error(op_a, op_f, a.order(), est_seed);
    const ErrorEstimate es =
        estimate_solve_error(op_a, op_finv, a.order(), est_seed);
    row.e_a = ea.value;
    row.e_s = es.value;
    row.estimator_warning = ea.warning || es.warning;

    const SolveReport rep =
        indefinite || !opts.spd
            ? gmres(op_a, rhs, op_finv, cfg.tol, cfg.max_iter)
            : pcg(op_a, rhs, op_finv, cfg.tol, cfg.max_iter);
    row.n_i = rep.iterations;
    row.r_true = rep.true_residual;
    if (!rep.converged) {
      std::ostringstream msg;
      msg << "solver did not converge in " << rep.iterations
          << " iterations (residual " << rep.residual << ")";
      row.status = msg.str();
    }
    if (cfg.verify && row.num_dofs <= kVerifyLimit) {
      row.e_verify = dense_verify(a, f);
    }
  } catch (const std::exception& err) {
    row.status = std::string("error: ") + err.what();
  }
  return row;
}

void write_csv_header(std::ostream& out) {
  out << "example,algo,dim,n,N,eps,kappa,seed,s_L,t_f,m_f,t_a,t_s,e_a,e_s,"
         "n_i,r_true,warning,e_verify,status\n";
}

void write_csv_row(std::ostream& out, const BenchRow& row) {
  std::ostringstream s;
  s << std::setprecision(6);
  s << row.example_id << ',' << row.algo << ',' << row.dim << ',' << row.n
    << ',' << row.num_dofs << ',' << row.eps << ',';
  if (row.kappa) s << *row.kappa;
  s << ',' << row.seed << ',' << row.top_size << ',' << row.t_f << ','
    << row.m_f << ',' << row.t_a << ',' << row.t_s << ',' << row.e_a << ','
    << row.e_s << ',' << row.n_i << ',' << row.r_true << ','
    << (row.estimator_warning ? 1 : 0)
    << ',';
  if (row.e_verify) s << *row.e_verify;
  s << ',' << csv_quote(row.status) << '\n';
  out << s.str();
}

bool run_sweep(const std::vector<BenchConfig>& configs, std::ostream& out) {
  write_csv_header(out);
  out.flush();
  bool all_ok = true;
  for (const auto& cfg : configs) {
    BenchRow row;
    try {
      row = run_example(cfg);
    } catch (const std::exception& err) {
      row.example_id = cfg.example_id;
      row.algo = std::string(to_string(cfg.algo));
      row.n = cfg.n;
      row.eps = cfg.eps;
      row.seed = cfg.seed;
      row.status = std::string("error: ") + err.what();
    }
    all_ok = all_ok && row.ok();
    write_csv_row(out, row);
    out.flush();
  }
  return all_ok;
}

void apply_thread_limit_from_env() {
  const char* env = std::getenv("HIFDE_NUM_THREADS");
  if (env == nullptr || *env == '\0') return;
  const int threads = std::atoi(env);
  if (threads <= 0) {
    throw std::invalid_argument("HIFDE_NUM_THREADS must be a positive integer");
  }
#ifdef _OPENMP
  omp_set_num_threads(threads);
#endif
}

}  // namespace hifde
