#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hifde/factor_ops.hpp"
#include "hifde/grid.hpp"
#include "hifde/partition.hpp"
#include "hifde/sparse.hpp"

namespace hifde {

enum class Algorithm { kMF, kHifde, kHifde3x };

std::string_view to_string(Algorithm algo);
// "mf", "hifde" (also "hifde2", "hifde3"), "hifde3x"
Algorithm parse_algorithm(std::string_view name);

// Operators produced at one level, applied in stored order.
struct LevelFactor {
  LevelTag tag;
  CellKind kind = CellKind::kInterior;
  std::vector<EliminationRecord> eliminations;
  std::vector<SkeletonRecord> skeletons;
};

struct LevelCount {
  LevelTag tag;
  Index active = 0;  // active DOFs after the level
};

struct FactorMetrics {
  Index top_size = 0;  // active DOFs left for the terminal block
  std::vector<LevelCount> active_counts;
  std::size_t bytes = 0;
  double seconds = 0.0;
};

// A ~= F = U^{-T} D U^{-1}, U the product of the stored elimination and
// interpolation operators in level order, D block diagonal.
class GeneralizedLDL {
 public:
  Index order = 0;
  int dim = 0;
  bool spd = true;
  double eps = 0.0;
  std::vector<LevelFactor> levels;
  EliminationRecord terminal;  // dense factor over the last active DOFs
  FactorMetrics metrics;

  // F x
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  // F^{-1} b
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& b) const;

  std::size_t stored_values() const;
  std::size_t num_records() const;
};

// Exact multifrontal factorization.
GeneralizedLDL factor_mf(const SparseSymMatrix& a, const GridConfig& grid,
                         bool spd);

// Interior elimination plus edge (2D) or face (3D) skeletonization at
// tolerance eps; skeletonization is skipped on levels below skip_levels.
GeneralizedLDL factor_hifde(const SparseSymMatrix& a, const GridConfig& grid,
                            double eps, bool spd, int skip_levels = 0);

// 3D variant that also skeletonizes edges, with interior cells rebuilt
// adaptively from level 1 on. Edge skeletonization is skipped on levels below
// skip_levels.
GeneralizedLDL factor_hifde3x(const SparseSymMatrix& a, const GridConfig& grid,
                              double eps, bool spd, int skip_levels = 1);

struct FactorOptions {
  Algorithm algo = Algorithm::kHifde;
  double eps = 1e-6;
  bool spd = true;
  int skip_levels = -1;  // negative: the algorithm's default
};

GeneralizedLDL factorize(const SparseSymMatrix& a, const GridConfig& grid,
                         const FactorOptions& opts);

// Versioned little-endian binary format.
void write_factor(std::ostream& out, const GeneralizedLDL& f);
void write_factor(const std::string& path, const GeneralizedLDL& f);
GeneralizedLDL read_factor(std::istream& in);
GeneralizedLDL read_factor(const std::string& path);

}  // namespace hifde
