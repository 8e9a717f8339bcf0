#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hifde/sparse.hpp"
#include "hifde/types.hpp"

namespace hifde {

// Uniform grid on the unit square or cube with n = 2^levels * m intervals
// per axis and zero Dirichlet data; DOFs are the (n-1)^dim interior points.
struct GridConfig {
  int dim = 2;
  int n = 0;
  int m = 0;
  int levels = 0;
  double h = 0.0;

  Index num_dofs() const;
  // Integer coordinates (1..n-1) of a DOF; unused axes are 0.
  std::array<int, 3> coords(Index dof) const;
  Index index(const std::array<int, 3>& j) const;
};

// Throws std::invalid_argument unless n = 2^L * m with L >= 1, m >= 2.
GridConfig build_grid(int dim, int n, int m);

// Coefficient samples. `a[axis]` lives on the staggered points j + e_axis/2,
// `b` on the interior grid points.
//
// Staggered layout for axis i: k = j_i in [0, n-1] (the point between j_i
// and j_i + 1), the remaining coordinates in [1, n-1]; linear index
// k + n * (j_b - 1) + n * (n-1) * (j_c - 1) over the other axes b < c.
struct CoeffField {
  int dim = 2;
  int n = 0;
  std::array<std::vector<double>, 3> a;
  std::vector<double> b;
  std::optional<double> contrast_ratio;
  std::optional<double> wave_number;

  std::size_t staggered_index(int axis, const std::array<int, 3>& j) const;
  // a at j + e_axis / 2, for 0 <= j_axis <= n-1
  double a_at(int axis, const std::array<int, 3>& j) const;
};

struct ProblemSpec {
  GridConfig grid;
  CoeffField field;
  int example_id = 1;
  std::uint64_t seed = 0;
};

CoeffField constant_field(const GridConfig& grid, double a0, double b0);

// Correlated uniform noise on the staggered points: i.i.d. standard-uniform
// samples convolved with an isotropic Gaussian of standard deviation 4h,
// truncated at radius 16h, normalized, reflected at the boundary.
CoeffField smoothed_noise_field(const GridConfig& grid, std::uint64_t seed);

// Raw standard-uniform samples in the same order smoothed_noise_field draws
// them.
CoeffField uniform_noise_field(const GridConfig& grid, std::uint64_t seed);

// smoothed_noise_field quantized at its median to {1e-2, 1e+2}; b = 0.
CoeffField high_contrast_field(const GridConfig& grid, std::uint64_t seed);

// Five-point (2D) or seven-point (3D) finite-difference operator
// -div(a grad u) + b u.
SparseSymMatrix assemble(const GridConfig& grid, const CoeffField& field);

// Builds grid and field for benchmark example 1..6.
// kappa: wavelengths across the domain for examples 3 and 6; when absent it
// follows from a fixed DOF count per wavelength (32 in 2D, 8 in 3D).
ProblemSpec make_problem(int example_id, int n, int m, std::uint64_t seed,
                         std::optional<double> kappa = std::nullopt);
int example_dim(int example_id);
bool example_is_spd(int example_id);
double default_kappa(int example_id, int n);

// CSV dump: field,ix,iy,iz,value with coordinates in half grid units.
void write_field_csv(std::ostream& out, const GridConfig& grid,
                     const CoeffField& field);

// Seeded standard-uniform doubles in [0, 1). The engine is fully specified
// by the standard and the bit-to-double mapping is fixed here, so streams are
// identical across platforms (std::uniform_real_distribution is not).
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hifde
