#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "hifde/grid.hpp"
#include "hifde/sparse.hpp"
#include "hifde/types.hpp"

namespace hifde {

enum class CellKind : std::uint8_t { kInterior, kEdge, kFace };

std::string_view to_string(CellKind kind);

struct Cell {
  IndexList dofs;              // ascending
  std::array<int, 3> center;   // doubled grid coordinates
  std::int64_t center_id = 0;  // linear index of center on the doubled lattice
};

// One level's collection of disjoint DOF sets, ordered by center_id.
struct CellSet {
  LevelTag tag;
  CellKind kind = CellKind::kInterior;
  std::vector<Cell> cells;

  std::size_t total_dofs() const;
};

// Active DOFs strictly inside the cells of width 2^level * m, one set per
// nonempty cell. DOFs on the separating hyperplanes are left out.
CellSet interior_cells(const GridConfig& grid, int level, const DofState& state);

// Voronoi grouping of the active DOFs about the centers of the interior
// edges (kind kEdge) or faces (kind kFace) of the level cells. DOFs lying on
// cell corners (2D edges), on cell edges (3D faces) or on cell vertices (3D
// edges) belong to several interfaces and are assigned to none.
CellSet interface_cells(const GridConfig& grid, int level,
                        const DofState& state, CellKind kind, LevelTag tag);

// Voronoi grouping about the level cell centers, then, visiting cells by
// ascending center_id, removal of every DOF coupled in `a` to another
// current cell. The result has no interactions between distinct cells.
CellSet adaptive_interior_cells(const SparseSymMatrix& a, const DofState& state,
                                const GridConfig& grid, int level);

// True when a(c, c') has no stored entry for distinct cells c, c'.
bool cells_non_interacting(const SparseSymMatrix& a, const CellSet& set);

// CSV rows: dof,level,cell,kind
void write_cells_csv_header(std::ostream& out);
void write_cells_csv(std::ostream& out, const CellSet& set);

}  // namespace hifde
