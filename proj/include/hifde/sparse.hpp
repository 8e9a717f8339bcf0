#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hifde/types.hpp"

namespace hifde {

// Dense copy of A restricted to (rows, cols).
struct DenseBlock {
  IndexList rows;
  IndexList cols;
  Eigen::MatrixXd values;
};

// Role of a DOF in the factorization.
enum class DofRole : std::uint8_t { kActive, kEliminated, kRedundant };

// Active-set bookkeeping s_l: which DOFs remain, and when and how the others
// left the active set.
class DofState {
 public:
  DofState() = default;
  explicit DofState(Index n);

  Index size() const { return static_cast<Index>(role_.size()); }
  Index num_active() const { return num_active_; }
  bool is_active(Index i) const { return role_[i] == DofRole::kActive; }
  DofRole role(Index i) const { return role_[i]; }
  const LevelTag& level(Index i) const { return level_[i]; }

  // Ascending list of active DOFs.
  IndexList active_indices() const;

  // Throws std::logic_error if any DOF in c is already inactive.
  void deactivate(std::span<const Index> c, LevelTag tag, DofRole role);

 private:
  std::vector<DofRole> role_;
  std::vector<LevelTag> level_;
  Index num_active_ = 0;
};

// Symmetric sparse matrix with mutable pattern. Each row keeps its entries
// sorted by column; both (i, j) and (j, i) are stored and always written
// together, so the pattern and values stay exactly symmetric.
class SparseSymMatrix {
 public:
  struct Entry {
    Index col;
    double value;
  };

  struct Triplet {
    Index row;
    Index col;
    double value;
  };

  SparseSymMatrix() = default;
  explicit SparseSymMatrix(Index n);

  // Duplicate (i, j) pairs are summed. Each off-diagonal pair may be given
  // once (either triangle); it is mirrored.
  static SparseSymMatrix from_triplets(Index n,
                                       std::span<const Triplet> triplets);
  static SparseSymMatrix from_dense(const Eigen::MatrixXd& dense);

  Index order() const { return static_cast<Index>(rows_.size()); }
  std::span<const Entry> row(Index i) const { return rows_[i]; }
  std::size_t num_stored() const;

  // A(i, j), zero if not stored. O(log deg).
  double at(Index i, Index j) const;
  bool has_entry(Index i, Index j) const;

  // Dense A(p, q); q need not be sorted. Throws std::out_of_range on a bad
  // index.
  DenseBlock submatrix(std::span<const Index> p, std::span<const Index> q) const;

  // Sorted { i not in c : A(i, c) stored }, restricted to DOFs active in
  // `state` when given.
  IndexList neighbor_set(std::span<const Index> c,
                         const DofState* state = nullptr) const;

  // A(q, q) += delta, creating fill-in as needed. delta must be symmetric;
  // only its lower triangle is read and mirrored.
  void apply_block_update(std::span<const Index> q, const Eigen::MatrixXd& delta);

  // Removes every entry with a row or column in c.
  void purge(std::span<const Index> c);

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;

  double frobenius_norm() const;

 private:
  std::vector<std::vector<Entry>> rows_;
  std::vector<char> mark_;  // scratch for purge()
};

// Removes c from the active set and purges its stored interactions.
void deactivate(SparseSymMatrix& a, DofState& state, std::span<const Index> c,
                LevelTag tag, DofRole role = DofRole::kEliminated);

// Matrix Market coordinate format, "real symmetric" (lower triangle).
void write_matrix_market(std::ostream& out, const SparseSymMatrix& a);
void write_matrix_market(const std::string& path, const SparseSymMatrix& a);
SparseSymMatrix read_matrix_market(std::istream& in);
SparseSymMatrix read_matrix_market(const std::string& path);

}  // namespace hifde
