#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace hifde {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct SolveReport {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;       // relative residual tracked by the iteration
  double true_residual = 0.0;  // ||b - A x|| / ||b||, recomputed from x
  bool converged = false;      // residual <= tol
};

// Preconditioned conjugate gradients from x = 0, stopping on the recurrence
// residual. In floating point the recomputed residual levels off near
// eps * || |A| |x| || / ||b||, which can exceed tol on ill-conditioned
// problems; it is reported separately.
SolveReport pcg(const LinearOperator& a, const Eigen::VectorXd& b,
                const LinearOperator& precond, double tol, int max_iter);

// Right-preconditioned restarted GMRES from x = 0.
SolveReport gmres(const LinearOperator& a, const Eigen::VectorXd& b,
                  const LinearOperator& precond, double tol, int max_iter,
                  int restart = 32);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // false when the iteration cap was reached
};

// ||G|| by power iteration on G^T G from a standard-uniform random start,
// stopping when successive estimates agree to rel_tol.
NormEstimate estimate_norm(const LinearOperator& g, const LinearOperator& gt,
                           Eigen::Index n, std::uint64_t seed,
                           double rel_tol = 1e-2, int max_iter = 512);

struct ErrorEstimate {
  double value = 0.0;
  bool warning = false;  // some power iteration hit its cap
};

// ||A - F|| / ||A|| for symmetric A and F.
ErrorEstimate estimate_apply_error(const LinearOperator& a,
                                   const LinearOperator& f, Eigen::Index n,
                                   std::uint64_t seed);

// ||I - A F^{-1}|| for symmetric A and F, given F^{-1}.
ErrorEstimate estimate_solve_error(const LinearOperator& a,
                                   const LinearOperator& f_inv, Eigen::Index n,
                                   std::uint64_t seed);

}  // namespace hifde
