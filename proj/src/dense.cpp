#include "hifde/dense.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

namespace hifde {

namespace {

bool identity_perm(const std::vector<Index>& perm) {
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] != static_cast<Index>(k)) return false;
  }
  return true;
}

// x <- P^T x
void permute_forward(const std::vector<Index>& perm,
                     Eigen::Ref<Eigen::MatrixXd> x) {
  if (identity_perm(perm)) return;
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (std::size_t k = 0; k < perm.size(); ++k) y.row(k) = x.row(perm[k]);
  x = y;
}

// x <- P x
void permute_backward(const std::vector<Index>& perm,
                      Eigen::Ref<Eigen::MatrixXd> x) {
  if (identity_perm(perm)) return;
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (std::size_t k = 0; k < perm.size(); ++k) y.row(perm[k]) = x.row(k);
  x = y;
}

double smallest_abs_eig2(double a, double b, double c) {
  // eigenvalues of [[a, b], [b, c]]
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return std::min(std::abs(mean - rad), std::abs(mean + rad));
}

[[noreturn]] void throw_singular(Index k, double pivot, double scale) {
  throw FactorizationError(
      FactorizationError::Kind::kSingular,
      "singular pivot " + std::to_string(pivot) + " at position " +
          std::to_string(k) + " (scale " + std::to_string(scale) + ")");
}

LdlFactor cholesky_ldl(const Eigen::MatrixXd& a) {
  const Index n = static_cast<Index>(a.rows());
  LdlFactor f;
  f.mode = LdlMode::kCholesky;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), 0);
  f.block_size.assign(n, 1);
  f.subdiag = Eigen::VectorXd::Zero(n);
  if (n == 0) {
    f.lower.resize(0, 0);
    f.diag.resize(0);
    return f;
  }
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError(FactorizationError::Kind::kIndefinite,
                             "Cholesky failed: block of order " +
                                 std::to_string(n) + " is not positive definite");
  }
  Eigen::MatrixXd g = llt.matrixL();
  f.diag = g.diagonal().array().square();
  for (Index k = 0; k < n; ++k) {
    if (!(f.diag[k] > kSingularPivotTol * scale)) {
      throw_singular(k, f.diag[k], scale);
    }
  }
  f.lower = g * g.diagonal().cwiseInverse().asDiagonal();
  f.lower.diagonal().setOnes();
  return f;
}

void swap_symmetric(Eigen::MatrixXd& w, Index a, Index b) {
  if (a == b) return;
  w.row(a).swap(w.row(b));
  w.col(a).swap(w.col(b));
}

// Unblocked Bunch-Kaufman on a full symmetric working copy.
LdlFactor bunch_kaufman(const Eigen::MatrixXd& a) {
  const Index n = static_cast<Index>(a.rows());
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  LdlFactor f;
  f.mode = LdlMode::kPivoted;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), 0);
  f.block_size.assign(n, 0);
  f.diag = Eigen::VectorXd::Zero(n);
  f.subdiag = Eigen::VectorXd::Zero(n);
  f.lower = Eigen::MatrixXd::Identity(n, n);
  if (n == 0) return f;

  Eigen::MatrixXd w = a;
  const double scale = a.cwiseAbs().maxCoeff();
  const double tiny = kSingularPivotTol * scale;

  Index k = 0;
  while (k < n) {
    const double absakk = std::abs(w(k, k));
    Index imax = k;
    double colmax = 0.0;
    for (Index i = k + 1; i < n; ++i) {
      if (std::abs(w(i, k)) > colmax) {
        colmax = std::abs(w(i, k));
        imax = i;
      }
    }

    int size = 1;
    Index kp = k;
    if (absakk >= alpha * colmax) {
      kp = k;
    } else {
      double rowmax = 0.0;
      for (Index j = k; j < n; ++j) {
        if (j != imax) rowmax = std::max(rowmax, std::abs(w(imax, j)));
      }
      if (absakk * rowmax >= alpha * colmax * colmax) {
        kp = k;
      } else if (std::abs(w(imax, imax)) >= alpha * rowmax) {
        kp = imax;
      } else {
        kp = imax;
        size = 2;
      }
    }

    const Index kk = k + size - 1;
    if (kp != kk) {
      swap_symmetric(w, kk, kp);
      std::swap(f.perm[kk], f.perm[kp]);
    }

    if (size == 1) {
      const double d = w(k, k);
      if (!(std::abs(d) > tiny)) throw_singular(k, d, scale);
      f.diag[k] = d;
      f.block_size[k] = 1;
      const Index rest = n - k - 1;
      if (rest > 0) {
        Eigen::VectorXd l = w.col(k).tail(rest) / d;
        w.bottomRightCorner(rest, rest).noalias() -= d * l * l.transpose();
        w.col(k).tail(rest) = l;
      }
      k += 1;
    } else {
      const double e11 = w(k, k);
      const double e21 = w(k + 1, k);
      const double e22 = w(k + 1, k + 1);
      if (!(smallest_abs_eig2(e11, e21, e22) > tiny)) {
        throw_singular(k, smallest_abs_eig2(e11, e21, e22), scale);
      }
      f.diag[k] = e11;
      f.diag[k + 1] = e22;
      f.subdiag[k] = e21;
      f.block_size[k] = 2;
      f.block_size[k + 1] = 0;
      const Index rest = n - k - 2;
      if (rest > 0) {
        const double det = e11 * e22 - e21 * e21;
        Eigen::Matrix2d einv;
        einv << e22 / det, -e21 / det, -e21 / det, e11 / det;
        Eigen::MatrixXd c = w.block(k + 2, k, rest, 2);
        Eigen::MatrixXd l = c * einv;
        w.bottomRightCorner(rest, rest).noalias() -= l * c.transpose();
        w.block(k + 2, k, rest, 2) = l;
      }
      w(k + 1, k) = 0.0;
      k += 2;
    }
  }
  f.lower.triangularView<Eigen::StrictlyLower>() = w;
  return f;
}

}  // namespace

void LdlFactor::solve_lower(Eigen::Ref<Eigen::MatrixXd> x) const {
  permute_forward(perm, x);
  lower.triangularView<Eigen::UnitLower>().solveInPlace(x);
}

void LdlFactor::solve_upper(Eigen::Ref<Eigen::MatrixXd> x) const {
  lower.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(x);
  permute_backward(perm, x);
}

void LdlFactor::apply_lower(Eigen::Ref<Eigen::MatrixXd> x) const {
  x = lower.triangularView<Eigen::UnitLower>() * x;
  permute_backward(perm, x);
}

void LdlFactor::apply_upper(Eigen::Ref<Eigen::MatrixXd> x) const {
  permute_forward(perm, x);
  x = lower.transpose().triangularView<Eigen::UnitUpper>() * x;
}

void LdlFactor::solve_diag(Eigen::Ref<Eigen::MatrixXd> x) const {
  const Index n = size();
  for (Index k = 0; k < n;) {
    if (block_size[k] == 2) {
      const double a = diag[k], b = subdiag[k], c = diag[k + 1];
      const double det = a * c - b * b;
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double u = x(k, j), v = x(k + 1, j);
        x(k, j) = (c * u - b * v) / det;
        x(k + 1, j) = (a * v - b * u) / det;
      }
      k += 2;
    } else {
      x.row(k) /= diag[k];
      k += 1;
    }
  }
}

void LdlFactor::apply_diag(Eigen::Ref<Eigen::MatrixXd> x) const {
  const Index n = size();
  for (Index k = 0; k < n;) {
    if (block_size[k] == 2) {
      const double a = diag[k], b = subdiag[k], c = diag[k + 1];
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double u = x(k, j), v = x(k + 1, j);
        x(k, j) = a * u + b * v;
        x(k + 1, j) = b * u + c * v;
      }
      k += 2;
    } else {
      x.row(k) *= diag[k];
      k += 1;
    }
  }
}

Eigen::MatrixXd LdlFactor::diag_matrix() const {
  const Index n = size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  apply_diag(d);
  return d;
}

Eigen::MatrixXd LdlFactor::reconstruct() const {
  const Index n = size();
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n);
  apply_upper(x);
  apply_diag(x);
  apply_lower(x);
  return x;
}

std::size_t LdlFactor::stored_values() const {
  const auto n = static_cast<std::size_t>(size());
  std::size_t two_by_two = 0;
  for (auto s : block_size) two_by_two += (s == 2);
  return n * (n - 1) / 2 + n + two_by_two;
}

LdlFactor ldl(const Eigen::MatrixXd& block, bool spd_mode) {
  if (block.rows() != block.cols()) {
    throw std::invalid_argument("ldl: block is not square");
  }
  return spd_mode ? cholesky_ldl(block) : bunch_kaufman(block);
}

IdResult interpolative_decomposition(const Eigen::MatrixXd& m, double tol) {
  const Index rows = static_cast<Index>(m.rows());
  const Index cols = static_cast<Index>(m.cols());
  IdResult out;
  std::vector<Index> piv(cols);
  std::iota(piv.begin(), piv.end(), 0);

  Eigen::MatrixXd r = m;
  const Index steps = std::min(rows, cols);
  double r11 = 0.0;
  double cutoff = 0.0;
  Index k = 0;
  bool stopped = false;
  for (; k < steps; ++k) {
    const Index tail_rows = rows - k;
    const Index tail_cols = cols - k;
    Eigen::Index best = 0;
    const Eigen::VectorXd norms =
        r.bottomRightCorner(tail_rows, tail_cols).colwise().norm();
    const double best_norm = norms.maxCoeff(&best);
    if (k == 0) {
      r11 = best_norm;
      cutoff = tol > 0.0 ? tol * r11
                         : std::max(rows, cols) * DBL_EPSILON * r11;
    }
    if (best_norm <= cutoff) {
      out.residual = best_norm;
      stopped = true;
      break;
    }
    const Index p = k + static_cast<Index>(best);
    if (p != k) {
      r.col(k).swap(r.col(p));
      std::swap(piv[k], piv[p]);
    }
    // Householder reflector zeroing r(k+1:, k)
    Eigen::VectorXd v = r.col(k).tail(tail_rows);
    const double alpha = v[0] >= 0.0 ? -best_norm : best_norm;
    v[0] -= alpha;
    const double vnorm2 = v.squaredNorm();
    if (vnorm2 > 0.0 && tail_cols > 1) {
      auto trailing = r.bottomRightCorner(tail_rows, tail_cols - 1);
      const Eigen::RowVectorXd proj = (v.transpose() * trailing) * (2.0 / vnorm2);
      trailing.noalias() -= v * proj;
    }
    r(k, k) = alpha;
    r.col(k).tail(tail_rows - 1).setZero();
  }
  if (!stopped) out.residual = 0.0;

  out.rank = k;
  Eigen::MatrixXd t_piv;
  if (k > 0 && cols > k) {
    t_piv = r.topRightCorner(k, cols - k);
    r.topLeftCorner(k, k).triangularView<Eigen::Upper>().solveInPlace(t_piv);
  } else {
    t_piv = Eigen::MatrixXd::Zero(k, cols - k);
  }

  // sort skeleton and redundant sets, permuting interp to match
  std::vector<Index> sk_order(k), rd_order(cols - k);
  std::iota(sk_order.begin(), sk_order.end(), 0);
  std::iota(rd_order.begin(), rd_order.end(), 0);
  std::sort(sk_order.begin(), sk_order.end(),
            [&](Index x, Index y) { return piv[x] < piv[y]; });
  std::sort(rd_order.begin(), rd_order.end(),
            [&](Index x, Index y) { return piv[k + x] < piv[k + y]; });
  out.skeleton.resize(k);
  out.redundant.resize(cols - k);
  out.interp.resize(k, cols - k);
  for (Index i = 0; i < k; ++i) out.skeleton[i] = piv[sk_order[i]];
  for (Index j = 0; j < cols - k; ++j) out.redundant[j] = piv[k + rd_order[j]];
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < cols - k; ++j) {
      out.interp(i, j) = t_piv(sk_order[i], rd_order[j]);
    }
  }
  return out;
}

Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& a_qq,
                                 const Eigen::MatrixXd& a_qp,
                                 const LdlFactor& ldl_pp) {
  Eigen::MatrixXd w = a_qp.transpose();
  ldl_pp.solve_lower(w);
  Eigen::MatrixXd y = w;
  ldl_pp.solve_diag(y);
  Eigen::MatrixXd b = a_qq;
  b.noalias() -= w.transpose() * y;
  symmetrize(b);
  return b;
}

}  // namespace hifde
