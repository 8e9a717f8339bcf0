#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hifde/types.hpp"

namespace hifde {

enum class LdlMode : std::uint8_t { kCholesky, kPivoted };

// A = P L D L^T P^T with L unit lower triangular and D block diagonal with
// 1x1 and (pivoted mode only) 2x2 blocks. `perm` maps factored position to
// input row: (P^T v)[k] = v[perm[k]].
struct LdlFactor {
  LdlMode mode = LdlMode::kCholesky;
  Eigen::MatrixXd lower;
  Eigen::VectorXd diag;
  Eigen::VectorXd subdiag;  // subdiag[k] couples k and k+1 in a 2x2 block
  std::vector<std::uint8_t> block_size;  // 1 or 2 at block starts, 0 inside
  std::vector<Index> perm;

  Index size() const { return static_cast<Index>(diag.size()); }

  // x <- L^{-1} P^T x
  void solve_lower(Eigen::Ref<Eigen::MatrixXd> x) const;
  // x <- P L^{-T} x
  void solve_upper(Eigen::Ref<Eigen::MatrixXd> x) const;
  // x <- D^{-1} x
  void solve_diag(Eigen::Ref<Eigen::MatrixXd> x) const;
  // x <- P L x
  void apply_lower(Eigen::Ref<Eigen::MatrixXd> x) const;
  // x <- L^T P^T x
  void apply_upper(Eigen::Ref<Eigen::MatrixXd> x) const;
  // x <- D x
  void apply_diag(Eigen::Ref<Eigen::MatrixXd> x) const;

  Eigen::MatrixXd reconstruct() const;
  Eigen::MatrixXd diag_matrix() const;
  // number of stored doubles
  std::size_t stored_values() const;
};

// Relative pivot magnitude below which a block is reported singular.
inline constexpr double kSingularPivotTol = 1e-14;

// Cholesky-based LDL^T when spd_mode, Bunch-Kaufman otherwise. Throws
// FactorizationError (kIndefinite when a Cholesky pivot is not positive,
// kSingular for a pivot below kSingularPivotTol times the diagonal scale).
LdlFactor ldl(const Eigen::MatrixXd& block, bool spd_mode);

// Column ID M(:, redundant) ~= M(:, skeleton) * interp from a column-pivoted
// QR truncated at the first |R_kk| <= tol * |R_11|. Index lists are local
// column numbers in ascending order; interp is |skeleton| x |redundant|.
struct IdResult {
  std::vector<Index> skeleton;
  std::vector<Index> redundant;
  Eigen::MatrixXd interp;
  Index rank = 0;
  double residual = 0.0;  // |R_{k+1,k+1}|, 0 if the factorization ran out
};

// tol == 0 asks for the numerical rank: the cutoff becomes
// max(rows, cols) * machine epsilon.
IdResult interpolative_decomposition(const Eigen::MatrixXd& m, double tol);

// A_qq - A_qp A_pp^{-1} A_qp^T, symmetrized.
Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& a_qq,
                                 const Eigen::MatrixXd& a_qp,
                                 const LdlFactor& ldl_pp);

inline void symmetrize(Eigen::MatrixXd& m) {
  m = (0.5 * (m + m.transpose())).eval();
}

}  // namespace hifde
