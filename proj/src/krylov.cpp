#include "hifde/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hifde/grid.hpp"

namespace hifde {

namespace {

double relative(double r, double bnorm) { return bnorm > 0.0 ? r / bnorm : r; }

}  // namespace

SolveReport pcg(const LinearOperator& a, const Eigen::VectorXd& b,
                const LinearOperator& precond, double tol, int max_iter) {
  SolveReport rep;
  rep.x = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.converged = true;
    return rep;
  }
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = precond(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  rep.residual = 1.0;
  while (rep.iterations < max_iter) {
    const Eigen::VectorXd ap = a(p);
    const double pap = p.dot(ap);
    if (pap == 0.0) break;
    const double alpha = rz / pap;
    rep.x += alpha * p;
    r -= alpha * ap;
    ++rep.iterations;
    rep.residual = relative(r.norm(), bnorm);
    if (rep.residual <= tol) break;
    z = precond(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  rep.converged = rep.residual <= tol;
  rep.true_residual = relative((b - a(rep.x)).norm(), bnorm);
  return rep;
}

SolveReport gmres(const LinearOperator& a, const Eigen::VectorXd& b,
                  const LinearOperator& precond, double tol, int max_iter,
                  int restart) {
  SolveReport rep;
  const Eigen::Index n = b.size();
  rep.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.converged = true;
    return rep;
  }
  restart = std::max(1, restart);
  Eigen::VectorXd r = b;
  rep.residual = 1.0;
  double estimate = 1.0;

  while (rep.iterations < max_iter) {
    const double beta = r.norm();
    std::vector<Eigen::VectorXd> v;
    v.push_back(r / beta);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(restart + 1, restart);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(restart);
    Eigen::VectorXd sn = Eigen::VectorXd::Zero(restart);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(restart + 1);
    g[0] = beta;
    int j = 0;
    for (; j < restart && rep.iterations < max_iter; ++j) {
      Eigen::VectorXd w = a(precond(v[j]));
      // modified Gram-Schmidt
      for (int i = 0; i <= j; ++i) {
        h(i, j) = w.dot(v[i]);
        w -= h(i, j) * v[i];
      }
      h(j + 1, j) = w.norm();
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs[j] = denom == 0.0 ? 1.0 : h(j, j) / denom;
      sn[j] = denom == 0.0 ? 0.0 : h(j + 1, j) / denom;
      const double hj1 = h(j + 1, j);
      h(j, j) = cs[j] * h(j, j) + sn[j] * hj1;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++rep.iterations;
      estimate = relative(std::abs(g[j + 1]), bnorm);
      const bool breakdown = hj1 == 0.0;
      if (!breakdown) v.push_back(w / hj1);
      if (estimate <= tol || breakdown) {
        ++j;
        break;
      }
    }
    // update x with the least-squares correction over the j built vectors
    Eigen::VectorXd y = g.head(j);
    h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solveInPlace(y);
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < j; ++i) dx += y[i] * v[i];
    rep.x += precond(dx);
    r = b - a(rep.x);
    rep.true_residual = relative(r.norm(), bnorm);
    rep.residual = estimate;
    if (estimate <= tol) break;
  }
  rep.converged = rep.residual <= tol;
  return rep;
}

NormEstimate estimate_norm(const LinearOperator& g, const LinearOperator& gt,
                           Eigen::Index n, std::uint64_t seed, double rel_tol,
                           int max_iter) {
  NormEstimate est;
  if (n == 0) {
    est.converged = true;
    return est;
  }
  UniformRng rng(seed);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.next();
  x.normalize();
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd z = gt(g(x));
    const double znorm = z.norm();
    est.value = std::sqrt(znorm);
    est.iterations = it;
    if (znorm == 0.0) {
      est.converged = true;
      return est;
    }
    if (it > 1 && std::abs(est.value - prev) <= rel_tol * est.value) {
      est.converged = true;
      return est;
    }
    prev = est.value;
    x = z / znorm;
  }
  return est;
}

ErrorEstimate estimate_apply_error(const LinearOperator& a,
                                   const LinearOperator& f, Eigen::Index n,
                                   std::uint64_t seed) {
  const LinearOperator diff = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = a(x);
    y -= f(x);
    return y;
  };
  const NormEstimate num = estimate_norm(diff, diff, n, seed);
  const NormEstimate den = estimate_norm(a, a, n, seed);
  ErrorEstimate out;
  out.value = den.value > 0.0 ? num.value / den.value : num.value;
  out.warning = !num.converged || !den.converged;
  return out;
}

ErrorEstimate estimate_solve_error(const LinearOperator& a,
                                   const LinearOperator& f_inv, Eigen::Index n,
                                   std::uint64_t seed) {
  const LinearOperator g = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = x;
    y -= a(f_inv(x));
    return y;
  };
  const LinearOperator gt = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = x;
    y -= f_inv(a(x));
    return y;
  };
  const NormEstimate est = estimate_norm(g, gt, n, seed);
  return ErrorEstimate{est.value, !est.converged};
}

}  // namespace hifde
