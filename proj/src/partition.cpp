#include "hifde/partition.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hifde {

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::kInterior:
      return "interior";
    case CellKind::kEdge:
      return "edge";
    case CellKind::kFace:
      return "face";
  }
  return "?";
}

std::size_t CellSet::total_dofs() const {
  std::size_t total = 0;
  for (const auto& c : cells) total += c.dofs.size();
  return total;
}

namespace {

int cell_width(const GridConfig& grid, int level) {
  if (level < 0 || level >= grid.levels) {
    throw std::invalid_argument("level " + std::to_string(level) +
                                " outside [0, " + std::to_string(grid.levels) +
                                ")");
  }
  return grid.m << level;
}

std::int64_t lattice_id(const GridConfig& grid, const std::array<int, 3>& x) {
  const std::int64_t side = 2 * static_cast<std::int64_t>(grid.n) + 1;
  std::int64_t id = 0;
  for (int d = grid.dim - 1; d >= 0; --d) id = id * side + x[d];
  return id;
}

// Centers along one axis, in doubled coordinates: offset + step * t for t in
// [lo, hi].
struct AxisCenters {
  int offset;
  int step;
  int lo;
  int hi;
};

// cell-width multiples w*a, a = 1..K-1
AxisCenters multiples(int w, int k) { return {0, 2 * w, 1, k - 1}; }
// half-width points w*(b - 1/2), b = 1..K
AxisCenters halves(int w, int k) { return {-w, 2 * w, 1, k}; }

// Index t in [lo, hi] of the center nearest to x; ties keep the lower one.
int nearest_on_axis(const AxisCenters& ac, int x) {
  const int rel = x - ac.offset;
  int t0 = rel >= 0 ? rel / ac.step : -((-rel + ac.step - 1) / ac.step);
  int best = std::clamp(t0, ac.lo, ac.hi);
  const int best_dist = std::abs(x - (ac.offset + ac.step * best));
  const int t1 = std::clamp(t0 + 1, ac.lo, ac.hi);
  const int d1 = std::abs(x - (ac.offset + ac.step * t1));
  if (d1 < best_dist) best = t1;
  return best;
}

using Family = std::array<AxisCenters, 3>;

std::vector<Family> center_families(int dim, int w, int k, CellKind kind) {
  std::vector<Family> fams;
  if (kind == CellKind::kInterior) {
    Family f{};
    for (int d = 0; d < dim; ++d) f[d] = halves(w, k);
    fams.push_back(f);
    return fams;
  }
  for (int axis = 0; axis < dim; ++axis) {
    Family f{};
    for (int d = 0; d < dim; ++d) {
      // 2D edges and 3D faces: the normal axis sits on a separator.
      // 3D edges: the edge axis is the only one off the separators.
      const bool on_separator =
          (kind == CellKind::kEdge && dim == 3) ? (d != axis) : (d == axis);
      f[d] = on_separator ? multiples(w, k) : halves(w, k);
    }
    fams.push_back(f);
  }
  return fams;
}

// Number of separator-aligned coordinates at or above which a DOF is shared
// by several groups and left out.
int exclusion_count(int dim, CellKind kind) {
  if (kind == CellKind::kInterior) return std::numeric_limits<int>::max();
  if (dim == 3 && kind == CellKind::kEdge) return 3;
  return 2;
}

// Nonempty slots ordered by center id.
std::vector<Cell> collect(std::vector<Cell>& slots) {
  std::vector<Cell> out;
  for (auto& c : slots) {
    if (!c.dofs.empty()) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Cell& a, const Cell& b) {
    return a.center_id < b.center_id;
  });
  return out;
}

std::vector<Cell> voronoi_groups(const GridConfig& grid, int level,
                                 const DofState& state, CellKind kind) {
  const int w = cell_width(grid, level);
  const int k = grid.n / w;
  const auto fams = center_families(grid.dim, w, k, kind);
  const int excl = exclusion_count(grid.dim, kind);

  // one slot per candidate center, numbered family by family
  std::vector<std::size_t> base(fams.size() + 1, 0);
  for (std::size_t f = 0; f < fams.size(); ++f) {
    std::size_t count = 1;
    for (int d = 0; d < grid.dim; ++d) {
      count *= static_cast<std::size_t>(std::max(0, fams[f][d].hi - fams[f][d].lo + 1));
    }
    base[f + 1] = base[f] + count;
  }
  std::vector<Cell> slots(base.back());

  for (Index i = 0; i < state.size(); ++i) {
    if (!state.is_active(i)) continue;
    const auto j = grid.coords(i);
    int aligned = 0;
    for (int d = 0; d < grid.dim; ++d) aligned += (j[d] % w == 0);
    if (aligned >= excl) continue;

    std::int64_t best_dist = std::numeric_limits<std::int64_t>::max();
    std::int64_t best_id = 0;
    std::size_t best_slot = 0;
    std::array<int, 3> best_center{0, 0, 0};
    for (std::size_t f = 0; f < fams.size(); ++f) {
      const Family& fam = fams[f];
      if (base[f + 1] == base[f]) continue;  // no centers in this family
      std::array<int, 3> c{0, 0, 0};
      std::int64_t dist = 0;
      std::size_t slot = 0;
      for (int d = grid.dim - 1; d >= 0; --d) {
        const int t = nearest_on_axis(fam[d], 2 * j[d]);
        slot = slot * static_cast<std::size_t>(fam[d].hi - fam[d].lo + 1) +
               static_cast<std::size_t>(t - fam[d].lo);
        c[d] = fam[d].offset + fam[d].step * t;
        const std::int64_t delta = c[d] - 2 * j[d];
        dist += delta * delta;
      }
      const std::int64_t id = lattice_id(grid, c);
      if (dist < best_dist || (dist == best_dist && id < best_id)) {
        best_dist = dist;
        best_id = id;
        best_slot = base[f] + slot;
        best_center = c;
      }
    }
    if (best_dist == std::numeric_limits<std::int64_t>::max()) continue;
    Cell& cell = slots[best_slot];
    cell.center = best_center;
    cell.center_id = best_id;
    cell.dofs.push_back(i);
  }
  return collect(slots);
}

}  // namespace

CellSet interior_cells(const GridConfig& grid, int level, const DofState& state) {
  const int w = cell_width(grid, level);
  CellSet set;
  set.tag = LevelTag{level, 0, 1};
  set.kind = CellKind::kInterior;

  const int k = grid.n / w;
  std::size_t total = 1;
  for (int d = 0; d < grid.dim; ++d) total *= static_cast<std::size_t>(k);
  std::vector<Cell> slots(total);
  for (Index i = 0; i < state.size(); ++i) {
    if (!state.is_active(i)) continue;
    const auto j = grid.coords(i);
    bool on_separator = false;
    std::array<int, 3> center{0, 0, 0};
    std::size_t slot = 0;
    for (int d = grid.dim - 1; d >= 0; --d) {
      if (j[d] % w == 0) {
        on_separator = true;
        break;
      }
      center[d] = w * (2 * (j[d] / w) + 1);
      slot = slot * static_cast<std::size_t>(k) + static_cast<std::size_t>(j[d] / w);
    }
    if (on_separator) continue;
    Cell& cell = slots[slot];
    cell.center = center;
    cell.center_id = lattice_id(grid, center);
    cell.dofs.push_back(i);
  }
  set.cells = collect(slots);
  return set;
}

CellSet interface_cells(const GridConfig& grid, int level,
                        const DofState& state, CellKind kind, LevelTag tag) {
  if (kind == CellKind::kInterior) {
    throw std::invalid_argument("interface_cells: kind must be edge or face");
  }
  if (kind == CellKind::kFace && grid.dim != 3) {
    throw std::invalid_argument("interface_cells: faces need a 3D grid");
  }
  CellSet set;
  set.tag = tag;
  set.kind = kind;
  set.cells = voronoi_groups(grid, level, state, kind);
  return set;
}

CellSet adaptive_interior_cells(const SparseSymMatrix& a, const DofState& state,
                                const GridConfig& grid, int level) {
  CellSet set;
  set.tag = LevelTag{level, 0, 1};
  set.kind = CellKind::kInterior;
  set.cells = voronoi_groups(grid, level, state, CellKind::kInterior);

  std::vector<Index> owner(static_cast<std::size_t>(a.order()), -1);
  for (std::size_t c = 0; c < set.cells.size(); ++c) {
    for (Index i : set.cells[c].dofs) owner[i] = static_cast<Index>(c);
  }
  for (std::size_t c = 0; c < set.cells.size(); ++c) {
    const Index self = static_cast<Index>(c);
    IndexList kept;
    IndexList boundary;
    for (Index i : set.cells[c].dofs) {
      bool coupled = false;
      for (const auto& e : a.row(i)) {
        const Index o = owner[e.col];
        if (o >= 0 && o != self) {
          coupled = true;
          break;
        }
      }
      (coupled ? boundary : kept).push_back(i);
    }
    for (Index i : boundary) owner[i] = -1;
    set.cells[c].dofs = std::move(kept);
  }
  std::erase_if(set.cells, [](const Cell& c) { return c.dofs.empty(); });
  return set;
}

bool cells_non_interacting(const SparseSymMatrix& a, const CellSet& set) {
  std::vector<Index> owner(static_cast<std::size_t>(a.order()), -1);
  for (std::size_t c = 0; c < set.cells.size(); ++c) {
    for (Index i : set.cells[c].dofs) {
      if (owner[i] >= 0) return false;  // overlapping sets
      owner[i] = static_cast<Index>(c);
    }
  }
  for (std::size_t c = 0; c < set.cells.size(); ++c) {
    for (Index i : set.cells[c].dofs) {
      for (const auto& e : a.row(i)) {
        const Index o = owner[e.col];
        if (o >= 0 && o != static_cast<Index>(c)) return false;
      }
    }
  }
  return true;
}

void write_cells_csv_header(std::ostream& out) { out << "dof,level,cell,kind\n"; }

void write_cells_csv(std::ostream& out, const CellSet& set) {
  const std::string level = set.tag.str();
  for (std::size_t c = 0; c < set.cells.size(); ++c) {
    for (Index i : set.cells[c].dofs) {
      out << i << ',' << level << ',' << c << ',' << to_string(set.kind) << '\n';
    }
  }
}

}  // namespace hifde
