#pragma once

#include <Eigen/Dense>

#include "hifde/dense.hpp"
#include "hifde/sparse.hpp"
#include "hifde/types.hpp"

namespace hifde {

// Block elimination of p against its neighbors q. With A(p, p) = P L D L^T
// P^T and coupling = D^{-1} L^{-1} P^T A(q, p)^T, the operator S acts on
// vectors by x_p <- P L^{-T} (x_p - coupling x_q) and S^T A S decouples p,
// leaving D on (p, p) and the Schur complement on (q, q).
struct EliminationRecord {
  IndexList p;
  IndexList q;
  LdlFactor fac;
  Eigen::MatrixXd coupling;  // |p| x |q|

  void apply_s(Eigen::VectorXd& x) const;
  void apply_st(Eigen::VectorXd& x) const;
  void apply_s_inv(Eigen::VectorXd& x) const;
  void apply_st_inv(Eigen::VectorXd& x) const;
  void apply_d(Eigen::VectorXd& x) const;
  void apply_d_inv(Eigen::VectorXd& x) const;

  std::size_t stored_values() const;
};

// Skeletonization of one DOF group: interp maps skeleton to redundant DOFs
// (operator Q: x_sk <- x_sk - interp x_rd), followed by elimination of the
// redundant DOFs against the skeletons.
struct SkeletonRecord {
  IndexList skeleton;
  IndexList redundant;
  Eigen::MatrixXd interp;  // |skeleton| x |redundant|
  EliminationRecord elim;  // p = redundant, q = skeleton

  void apply_q(Eigen::VectorXd& x) const;
  void apply_qt(Eigen::VectorXd& x) const;
  void apply_q_inv(Eigen::VectorXd& x) const;
  void apply_qt_inv(Eigen::VectorXd& x) const;

  std::size_t stored_values() const;
};

// Elimination split into a read-only phase, safe to run concurrently on
// non-interacting cells, and a commit that updates the matrix.
struct PendingElimination {
  EliminationRecord record;
  Eigen::MatrixXd update;  // added onto A(q, q)
};

PendingElimination prepare_elimination(const SparseSymMatrix& a,
                                       const DofState& state, IndexList c,
                                       bool spd);
void commit_elimination(SparseSymMatrix& a, DofState& state,
                        const PendingElimination& pending, LevelTag tag);

// Requires A(c, (c union c^N)^C) = 0. Deactivates c.
EliminationRecord eliminate_cell(SparseSymMatrix& a, DofState& state,
                                 const IndexList& c, LevelTag tag, bool spd);

// Compresses A(c^N, c) at relative tolerance eps, applies the interpolation
// congruence, drops the redundant/neighbor coupling and eliminates the
// redundant DOFs. With no redundant DOFs the matrix is left untouched.
SkeletonRecord skeletonize_cell(SparseSymMatrix& a, DofState& state,
                                const IndexList& c, double eps, LevelTag tag,
                                bool spd);

}  // namespace hifde
