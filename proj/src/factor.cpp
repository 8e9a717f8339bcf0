#include "hifde/factor.hpp"

#include <chrono>
#include <exception>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hifde {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kMF:
      return "mf";
    case Algorithm::kHifde:
      return "hifde";
    case Algorithm::kHifde3x:
      return "hifde3x";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "mf") return Algorithm::kMF;
  if (name == "hifde" || name == "hifde2" || name == "hifde3") {
    return Algorithm::kHifde;
  }
  if (name == "hifde3x") return Algorithm::kHifde3x;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

// --------------------------------------------------------------------------
// Application

Eigen::VectorXd GeneralizedLDL::apply(const Eigen::VectorXd& x) const {
  if (x.size() != order) throw std::invalid_argument("apply: size mismatch");
  Eigen::VectorXd y = x;
  for (const auto& lev : levels) {
    for (const auto& e : lev.eliminations) e.apply_s_inv(y);
    for (const auto& s : lev.skeletons) {
      s.apply_q_inv(y);
      if (!s.redundant.empty()) s.elim.apply_s_inv(y);
    }
  }
  terminal.apply_s_inv(y);

  for (const auto& lev : levels) {
    for (const auto& e : lev.eliminations) e.apply_d(y);
    for (const auto& s : lev.skeletons) {
      if (!s.redundant.empty()) s.elim.apply_d(y);
    }
  }
  terminal.apply_d(y);

  terminal.apply_st_inv(y);
  for (auto lev = levels.rbegin(); lev != levels.rend(); ++lev) {
    for (auto s = lev->skeletons.rbegin(); s != lev->skeletons.rend(); ++s) {
      if (!s->redundant.empty()) s->elim.apply_st_inv(y);
      s->apply_qt_inv(y);
    }
    for (auto e = lev->eliminations.rbegin(); e != lev->eliminations.rend(); ++e) {
      e->apply_st_inv(y);
    }
  }
  return y;
}

Eigen::VectorXd GeneralizedLDL::apply_inverse(const Eigen::VectorXd& b) const {
  if (b.size() != order) {
    throw std::invalid_argument("apply_inverse: size mismatch");
  }
  Eigen::VectorXd y = b;
  for (const auto& lev : levels) {
    for (const auto& e : lev.eliminations) e.apply_st(y);
    for (const auto& s : lev.skeletons) {
      s.apply_qt(y);
      if (!s.redundant.empty()) s.elim.apply_st(y);
    }
  }
  terminal.apply_st(y);

  for (const auto& lev : levels) {
    for (const auto& e : lev.eliminations) e.apply_d_inv(y);
    for (const auto& s : lev.skeletons) {
      if (!s.redundant.empty()) s.elim.apply_d_inv(y);
    }
  }
  terminal.apply_d_inv(y);

  terminal.apply_s(y);
  for (auto lev = levels.rbegin(); lev != levels.rend(); ++lev) {
    for (auto s = lev->skeletons.rbegin(); s != lev->skeletons.rend(); ++s) {
      if (!s->redundant.empty()) s->elim.apply_s(y);
      s->apply_q(y);
    }
    for (auto e = lev->eliminations.rbegin(); e != lev->eliminations.rend(); ++e) {
      e->apply_s(y);
    }
  }
  return y;
}

std::size_t GeneralizedLDL::stored_values() const {
  std::size_t total = terminal.stored_values();
  for (const auto& lev : levels) {
    for (const auto& e : lev.eliminations) total += e.stored_values();
    for (const auto& s : lev.skeletons) total += s.stored_values();
  }
  return total;
}

std::size_t GeneralizedLDL::num_records() const {
  std::size_t total = 0;
  for (const auto& lev : levels) {
    total += lev.eliminations.size() + lev.skeletons.size();
  }
  return total;
}

// --------------------------------------------------------------------------
// Drivers

namespace {

std::string describe_cell(const Cell& cell) {
  std::string s = "cell centered at (";
  for (int d = 0; d < 3; ++d) {
    if (d > 0) s += ", ";
    s += std::to_string(cell.center[d] / 2.0);
  }
  return s + ") with " + std::to_string(cell.dofs.size()) + " DOFs";
}

[[noreturn]] void rethrow_with_context(const FactorizationError& err,
                                       const LevelTag& tag, const Cell& cell) {
  throw FactorizationError(err.kind(), "level " + tag.str() + ", " +
                                           describe_cell(cell) + ": " +
                                           err.what());
}

class Builder {
 public:
  Builder(const SparseSymMatrix& a, const GridConfig& grid, double eps, bool spd)
      : a_(a), state_(a.order()), grid_(grid) {
    f_.order = a.order();
    f_.dim = grid.dim;
    f_.spd = spd;
    f_.eps = eps;
    start_ = std::chrono::steady_clock::now();
  }

  const SparseSymMatrix& matrix() const { return a_; }
  const DofState& state() const { return state_; }
  const GridConfig& grid() const { return grid_; }

  void eliminate(const CellSet& set) {
    if (set.cells.empty()) return;
    if (!cells_non_interacting(a_, set)) {
      throw std::logic_error("level " + set.tag.str() +
                             ": interior cells interact");
    }
    const auto ncells = static_cast<std::ptrdiff_t>(set.cells.size());
    std::vector<PendingElimination> pending(set.cells.size());
    std::vector<std::exception_ptr> errors(set.cells.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < ncells; ++c) {
      try {
        pending[c] = prepare_elimination(a_, state_, set.cells[c].dofs, f_.spd);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
    LevelFactor lev;
    lev.tag = set.tag;
    lev.kind = set.kind;
    lev.eliminations.reserve(set.cells.size());
    for (std::size_t c = 0; c < set.cells.size(); ++c) {
      if (errors[c]) {
        try {
          std::rethrow_exception(errors[c]);
        } catch (const FactorizationError& err) {
          rethrow_with_context(err, set.tag, set.cells[c]);
        }
      }
      commit_elimination(a_, state_, pending[c], set.tag);
      lev.eliminations.push_back(std::move(pending[c].record));
      pending[c].update.resize(0, 0);
    }
    finish_level(std::move(lev));
  }

  void skeletonize(const CellSet& set) {
    if (set.cells.empty()) return;
    LevelFactor lev;
    lev.tag = set.tag;
    lev.kind = set.kind;
    lev.skeletons.reserve(set.cells.size());
    for (const Cell& cell : set.cells) {
      try {
        lev.skeletons.push_back(
            skeletonize_cell(a_, state_, cell.dofs, f_.eps, set.tag, f_.spd));
      } catch (const FactorizationError& err) {
        rethrow_with_context(err, set.tag, cell);
      }
    }
    finish_level(std::move(lev));
  }

  GeneralizedLDL finish() {
    const IndexList rest = state_.active_indices();
    f_.metrics.top_size = static_cast<Index>(rest.size());
    try {
      f_.terminal = eliminate_cell(a_, state_, rest, LevelTag{grid_.levels, 0, 1},
                                   f_.spd);
    } catch (const FactorizationError& err) {
      throw FactorizationError(
          err.kind(), "level " + LevelTag{grid_.levels, 0, 1}.str() +
                          ", terminal block of " + std::to_string(rest.size()) +
                          " DOFs: " + err.what());
    }
    f_.metrics.bytes = 8 * f_.stored_values();
    f_.metrics.seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    return std::move(f_);
  }

 private:
  void finish_level(LevelFactor lev) {
    f_.metrics.active_counts.push_back({lev.tag, state_.num_active()});
    f_.levels.push_back(std::move(lev));
  }

  SparseSymMatrix a_;
  DofState state_;
  GridConfig grid_;
  GeneralizedLDL f_;
  std::chrono::steady_clock::time_point start_;
};

void check_order(const SparseSymMatrix& a, const GridConfig& grid) {
  if (a.order() != grid.num_dofs()) {
    throw std::invalid_argument("matrix order " + std::to_string(a.order()) +
                                " does not match grid with " +
                                std::to_string(grid.num_dofs()) + " DOFs");
  }
}

}  // namespace

GeneralizedLDL factor_mf(const SparseSymMatrix& a, const GridConfig& grid,
                         bool spd) {
  check_order(a, grid);
  Builder b(a, grid, 0.0, spd);
  for (int level = 0; level < grid.levels; ++level) {
    b.eliminate(interior_cells(grid, level, b.state()));
  }
  return b.finish();
}

GeneralizedLDL factor_hifde(const SparseSymMatrix& a, const GridConfig& grid,
                            double eps, bool spd, int skip_levels) {
  check_order(a, grid);
  const CellKind kind = grid.dim == 2 ? CellKind::kEdge : CellKind::kFace;
  Builder b(a, grid, eps, spd);
  for (int level = 0; level < grid.levels; ++level) {
    b.eliminate(interior_cells(grid, level, b.state()));
    if (level < skip_levels) continue;
    b.skeletonize(
        interface_cells(grid, level, b.state(), kind, LevelTag{level, 1, 2}));
  }
  return b.finish();
}

GeneralizedLDL factor_hifde3x(const SparseSymMatrix& a, const GridConfig& grid,
                              double eps, bool spd, int skip_levels) {
  check_order(a, grid);
  if (grid.dim != 3) {
    throw std::invalid_argument("hifde3x needs a 3D grid");
  }
  Builder b(a, grid, eps, spd);
  for (int level = 0; level < grid.levels; ++level) {
    if (level == 0) {
      b.eliminate(interior_cells(grid, level, b.state()));
    } else {
      b.eliminate(adaptive_interior_cells(b.matrix(), b.state(), grid, level));
    }
    b.skeletonize(interface_cells(grid, level, b.state(), CellKind::kFace,
                                  LevelTag{level, 1, 3}));
    if (level < skip_levels) continue;
    b.skeletonize(interface_cells(grid, level, b.state(), CellKind::kEdge,
                                  LevelTag{level, 2, 3}));
  }
  return b.finish();
}

GeneralizedLDL factorize(const SparseSymMatrix& a, const GridConfig& grid,
                         const FactorOptions& opts) {
  switch (opts.algo) {
    case Algorithm::kMF:
      return factor_mf(a, grid, opts.spd);
    case Algorithm::kHifde:
      return factor_hifde(a, grid, opts.eps, opts.spd,
                          opts.skip_levels < 0 ? 0 : opts.skip_levels);
    case Algorithm::kHifde3x:
      return factor_hifde3x(a, grid, opts.eps, opts.spd,
                            opts.skip_levels < 0 ? 1 : opts.skip_levels);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace hifde
