#include "hifde/factor_ops.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hifde {

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& x, const IndexList& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = x[idx[k]];
  return out;
}

void scatter(Eigen::VectorXd& x, const IndexList& idx, const Eigen::VectorXd& v) {
  for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = v[k];
}

void scatter_add(Eigen::VectorXd& x, const IndexList& idx,
                 const Eigen::VectorXd& v) {
  for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] += v[k];
}

void require_active(const DofState& state, const IndexList& c) {
  for (Index i : c) {
    if (!state.is_active(i)) {
      throw std::logic_error("DOF " + std::to_string(i) + " is no longer active");
    }
  }
}

IndexList pick(const IndexList& from, const std::vector<Index>& local) {
  IndexList out;
  out.reserve(local.size());
  for (Index k : local) out.push_back(from[k]);
  return out;
}

}  // namespace

// --------------------------------------------------------------------------
// EliminationRecord

void EliminationRecord::apply_s(Eigen::VectorXd& x) const {
  Eigen::VectorXd xp = gather(x, p);
  if (!q.empty()) xp.noalias() -= coupling * gather(x, q);
  fac.solve_upper(xp);
  scatter(x, p, xp);
}

void EliminationRecord::apply_st(Eigen::VectorXd& x) const {
  Eigen::VectorXd xp = gather(x, p);
  fac.solve_lower(xp);
  scatter(x, p, xp);
  if (!q.empty()) scatter_add(x, q, -(coupling.transpose() * xp));
}

void EliminationRecord::apply_s_inv(Eigen::VectorXd& x) const {
  Eigen::VectorXd xp = gather(x, p);
  fac.apply_upper(xp);
  if (!q.empty()) xp.noalias() += coupling * gather(x, q);
  scatter(x, p, xp);
}

void EliminationRecord::apply_st_inv(Eigen::VectorXd& x) const {
  Eigen::VectorXd xp = gather(x, p);
  if (!q.empty()) scatter_add(x, q, coupling.transpose() * xp);
  fac.apply_lower(xp);
  scatter(x, p, xp);
}

void EliminationRecord::apply_d(Eigen::VectorXd& x) const {
  Eigen::VectorXd xp = gather(x, p);
  fac.apply_diag(xp);
  scatter(x, p, xp);
}

void EliminationRecord::apply_d_inv(Eigen::VectorXd& x) const {
  Eigen::VectorXd xp = gather(x, p);
  fac.solve_diag(xp);
  scatter(x, p, xp);
}

std::size_t EliminationRecord::stored_values() const {
  return fac.stored_values() + static_cast<std::size_t>(coupling.size());
}

// --------------------------------------------------------------------------
// SkeletonRecord

void SkeletonRecord::apply_q(Eigen::VectorXd& x) const {
  if (redundant.empty() || skeleton.empty()) return;
  scatter_add(x, skeleton, -(interp * gather(x, redundant)));
}

void SkeletonRecord::apply_qt(Eigen::VectorXd& x) const {
  if (redundant.empty() || skeleton.empty()) return;
  scatter_add(x, redundant, -(interp.transpose() * gather(x, skeleton)));
}

void SkeletonRecord::apply_q_inv(Eigen::VectorXd& x) const {
  if (redundant.empty() || skeleton.empty()) return;
  scatter_add(x, skeleton, interp * gather(x, redundant));
}

void SkeletonRecord::apply_qt_inv(Eigen::VectorXd& x) const {
  if (redundant.empty() || skeleton.empty()) return;
  scatter_add(x, redundant, interp.transpose() * gather(x, skeleton));
}

std::size_t SkeletonRecord::stored_values() const {
  if (redundant.empty()) return 0;
  return static_cast<std::size_t>(interp.size()) + elim.stored_values();
}

// --------------------------------------------------------------------------
// Elimination

PendingElimination prepare_elimination(const SparseSymMatrix& a,
                                       const DofState& state, IndexList c,
                                       bool spd) {
  require_active(state, c);
  std::sort(c.begin(), c.end());
  PendingElimination out;
  EliminationRecord& rec = out.record;
  rec.p = std::move(c);
  rec.q = a.neighbor_set(rec.p, &state);
  const Eigen::MatrixXd a_pp = a.submatrix(rec.p, rec.p).values;
  rec.fac = ldl(a_pp, spd);
  Eigen::MatrixXd w = a.submatrix(rec.p, rec.q).values;  // A(q, p)^T
  rec.fac.solve_lower(w);
  rec.coupling = w;
  rec.fac.solve_diag(rec.coupling);
  out.update.noalias() = -(w.transpose() * rec.coupling);
  symmetrize(out.update);
  return out;
}

void commit_elimination(SparseSymMatrix& a, DofState& state,
                        const PendingElimination& pending, LevelTag tag) {
  a.apply_block_update(pending.record.q, pending.update);
  deactivate(a, state, pending.record.p, tag, DofRole::kEliminated);
}

EliminationRecord eliminate_cell(SparseSymMatrix& a, DofState& state,
                                 const IndexList& c, LevelTag tag, bool spd) {
  PendingElimination pending = prepare_elimination(a, state, c, spd);
  commit_elimination(a, state, pending, tag);
  return std::move(pending.record);
}

// --------------------------------------------------------------------------
// Skeletonization

SkeletonRecord skeletonize_cell(SparseSymMatrix& a, DofState& state,
                                const IndexList& c_in, double eps, LevelTag tag,
                                bool spd) {
  require_active(state, c_in);
  IndexList c = c_in;
  std::sort(c.begin(), c.end());
  const IndexList nbr = a.neighbor_set(c, &state);
  const Eigen::MatrixXd k_nc = a.submatrix(nbr, c).values;

  IdResult id = interpolative_decomposition(k_nc, eps);
  SkeletonRecord rec;
  rec.skeleton = pick(c, id.skeleton);
  rec.redundant = pick(c, id.redundant);
  rec.interp = std::move(id.interp);
  if (rec.redundant.empty()) return rec;

  const Eigen::MatrixXd a_cc = a.submatrix(c, c).values;
  const auto ns = static_cast<Eigen::Index>(id.skeleton.size());
  const auto nr = static_cast<Eigen::Index>(id.redundant.size());
  Eigen::MatrixXd a_rr(nr, nr), a_sr(ns, nr), a_ss(ns, ns);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nr; ++j) {
      a_rr(i, j) = a_cc(id.redundant[i], id.redundant[j]);
    }
    for (Eigen::Index j = 0; j < ns; ++j) {
      a_sr(j, i) = a_cc(id.skeleton[j], id.redundant[i]);
    }
  }
  for (Eigen::Index i = 0; i < ns; ++i) {
    for (Eigen::Index j = 0; j < ns; ++j) {
      a_ss(i, j) = a_cc(id.skeleton[i], id.skeleton[j]);
    }
  }

  const Eigen::MatrixXd& t = rec.interp;
  Eigen::MatrixXd b_rr = a_rr;
  Eigen::MatrixXd b_sr = a_sr;
  if (ns > 0) {
    const Eigen::MatrixXd tt_asr = t.transpose() * a_sr;
    const Eigen::MatrixXd ass_t = a_ss * t;
    b_rr -= tt_asr + tt_asr.transpose();
    b_rr.noalias() += t.transpose() * ass_t;
    b_sr -= ass_t;
  }
  symmetrize(b_rr);

  EliminationRecord& el = rec.elim;
  el.p = rec.redundant;
  el.q = rec.skeleton;
  el.fac = ldl(b_rr, spd);
  Eigen::MatrixXd w = b_sr.transpose();
  el.fac.solve_lower(w);
  el.coupling = w;
  el.fac.solve_diag(el.coupling);

  if (ns > 0) {
    Eigen::MatrixXd update = -(w.transpose() * el.coupling);
    symmetrize(update);
    a.apply_block_update(rec.skeleton, update);
  }
  deactivate(a, state, rec.redundant, tag, DofRole::kRedundant);
  return rec;
}

}  // namespace hifde
