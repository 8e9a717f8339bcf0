#include "hifde/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace hifde {

Index GridConfig::num_dofs() const {
  Index total = 1;
  for (int d = 0; d < dim; ++d) total *= (n - 1);
  return total;
}

std::array<int, 3> GridConfig::coords(Index dof) const {
  std::array<int, 3> j{0, 0, 0};
  const int side = n - 1;
  for (int d = 0; d < dim; ++d) {
    j[d] = static_cast<int>(dof % side) + 1;
    dof /= side;
  }
  return j;
}

Index GridConfig::index(const std::array<int, 3>& j) const {
  const int side = n - 1;
  Index idx = 0;
  for (int d = dim - 1; d >= 0; --d) idx = idx * side + (j[d] - 1);
  return idx;
}

GridConfig build_grid(int dim, int n, int m) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (m < 2) throw std::invalid_argument("leaf size m must be >= 2");
  if (n <= 0 || n % m != 0) {
    throw std::invalid_argument("n = " + std::to_string(n) +
                                " is not a multiple of m = " + std::to_string(m));
  }
  int ratio = n / m;
  int levels = 0;
  while (ratio > 1 && ratio % 2 == 0) {
    ratio /= 2;
    ++levels;
  }
  if (ratio != 1 || levels < 1) {
    throw std::invalid_argument("n = " + std::to_string(n) +
                                " is not 2^L * " + std::to_string(m) +
                                " with L >= 1");
  }
  return GridConfig{dim, n, m, levels, 1.0 / n};
}

// --------------------------------------------------------------------------
// Coefficient fields

std::size_t CoeffField::staggered_index(int axis,
                                        const std::array<int, 3>& j) const {
  std::size_t idx = 0;
  std::size_t stride = 1;
  idx += static_cast<std::size_t>(j[axis]) * stride;
  stride *= static_cast<std::size_t>(n);
  for (int d = 0; d < dim; ++d) {
    if (d == axis) continue;
    idx += static_cast<std::size_t>(j[d] - 1) * stride;
    stride *= static_cast<std::size_t>(n - 1);
  }
  return idx;
}

double CoeffField::a_at(int axis, const std::array<int, 3>& j) const {
  return a[axis][staggered_index(axis, j)];
}

namespace {

std::size_t staggered_count(const GridConfig& g) {
  std::size_t count = static_cast<std::size_t>(g.n);
  for (int d = 1; d < g.dim; ++d) count *= static_cast<std::size_t>(g.n - 1);
  return count;
}

// Inverse of CoeffField::staggered_index.
std::array<int, 3> staggered_coords(const GridConfig& g, int axis,
                                    std::size_t idx) {
  std::array<int, 3> j{0, 0, 0};
  j[axis] = static_cast<int>(idx % g.n);
  idx /= g.n;
  for (int d = 0; d < g.dim; ++d) {
    if (d == axis) continue;
    j[d] = static_cast<int>(idx % (g.n - 1)) + 1;
    idx /= (g.n - 1);
  }
  return j;
}

// Position of a staggered sample on the half-spacing lattice (coordinates
// doubled so they are integers in [0, 2n]).
std::array<int, 3> half_lattice_point(int axis, const std::array<int, 3>& j) {
  std::array<int, 3> x{0, 0, 0};
  for (int d = 0; d < 3; ++d) x[d] = 2 * j[d];
  x[axis] = 2 * j[axis] + 1;
  return x;
}

int reflect(int t, int hi) {
  while (t < 0 || t > hi) {
    if (t < 0) t = -t;
    if (t > hi) t = 2 * hi - t;
  }
  return t;
}

void convolve_axis(std::vector<double>& data, int dim, int side, int axis,
                   const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  std::size_t stride = 1;
  for (int d = 0; d < axis; ++d) stride *= static_cast<std::size_t>(side);
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(side);
  const std::size_t block = stride * static_cast<std::size_t>(side);
  // line padded by reflection on both ends
  std::vector<double> line(static_cast<std::size_t>(side + 2 * radius));
  for (std::size_t outer = 0; outer < total; outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = outer + inner;
      for (int t = -radius; t < side + radius; ++t) {
        line[t + radius] = data[base + reflect(t, side - 1) * stride];
      }
      for (int t = 0; t < side; ++t) {
        double s = 0.0;
        for (std::size_t r = 0; r < kernel.size(); ++r) {
          s += kernel[r] * line[t + r];
        }
        data[base + t * stride] = s;
      }
    }
  }
}

CoeffField empty_field(const GridConfig& g) {
  CoeffField f;
  f.dim = g.dim;
  f.n = g.n;
  for (int d = 0; d < g.dim; ++d) f.a[d].assign(staggered_count(g), 0.0);
  f.b.assign(static_cast<std::size_t>(g.num_dofs()), 0.0);
  return f;
}

}  // namespace

CoeffField constant_field(const GridConfig& grid, double a0, double b0) {
  CoeffField f = empty_field(grid);
  for (int d = 0; d < grid.dim; ++d) std::fill(f.a[d].begin(), f.a[d].end(), a0);
  std::fill(f.b.begin(), f.b.end(), b0);
  return f;
}

CoeffField uniform_noise_field(const GridConfig& grid, std::uint64_t seed) {
  CoeffField f = empty_field(grid);
  UniformRng rng(seed);
  for (int d = 0; d < grid.dim; ++d) {
    for (double& v : f.a[d]) v = rng.next();
  }
  return f;
}

CoeffField smoothed_noise_field(const GridConfig& grid, std::uint64_t seed) {
  CoeffField f = uniform_noise_field(grid, seed);
  const int side = 2 * grid.n + 1;
  std::size_t total = 1;
  for (int d = 0; d < grid.dim; ++d) total *= static_cast<std::size_t>(side);
  auto lattice_index = [&](const std::array<int, 3>& x) {
    std::size_t idx = 0;
    for (int d = grid.dim - 1; d >= 0; --d) idx = idx * side + x[d];
    return idx;
  };

  std::vector<double> values(total, 0.0);
  std::vector<double> weights(total, 0.0);
  for (int axis = 0; axis < grid.dim; ++axis) {
    for (std::size_t s = 0; s < f.a[axis].size(); ++s) {
      const auto x = half_lattice_point(axis, staggered_coords(grid, axis, s));
      values[lattice_index(x)] = f.a[axis][s];
      weights[lattice_index(x)] = 1.0;
    }
  }

  // std dev 4h = 8 half-steps, cut at 4 std devs
  const double sigma = 8.0;
  const int radius = 32;
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int r = -radius; r <= radius; ++r) {
    kernel[r + radius] = std::exp(-0.5 * r * r / (sigma * sigma));
    sum += kernel[r + radius];
  }
  for (double& k : kernel) k /= sum;

  for (int axis = 0; axis < grid.dim; ++axis) {
    convolve_axis(values, grid.dim, side, axis, kernel);
    convolve_axis(weights, grid.dim, side, axis, kernel);
  }

  for (int axis = 0; axis < grid.dim; ++axis) {
    for (std::size_t s = 0; s < f.a[axis].size(); ++s) {
      const auto x = half_lattice_point(axis, staggered_coords(grid, axis, s));
      const std::size_t li = lattice_index(x);
      f.a[axis][s] = values[li] / weights[li];
    }
  }
  return f;
}

CoeffField high_contrast_field(const GridConfig& grid, std::uint64_t seed) {
  CoeffField f = smoothed_noise_field(grid, seed);
  std::vector<double> all;
  for (int d = 0; d < grid.dim; ++d) {
    all.insert(all.end(), f.a[d].begin(), f.a[d].end());
  }
  const std::size_t mid = (all.size() - 1) / 2;
  std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mid),
                   all.end());
  const double median = all[mid];
  for (int d = 0; d < grid.dim; ++d) {
    for (double& v : f.a[d]) v = (v <= median) ? 1e-2 : 1e2;
  }
  f.contrast_ratio = 1e4;
  return f;
}

// --------------------------------------------------------------------------
// Assembly

SparseSymMatrix assemble(const GridConfig& grid, const CoeffField& field) {
  if (field.dim != grid.dim || field.n != grid.n) {
    throw std::invalid_argument("assemble: field does not match grid");
  }
  const Index ndof = grid.num_dofs();
  const double inv_h2 = static_cast<double>(grid.n) * grid.n;
  std::vector<SparseSymMatrix::Triplet> trip;
  trip.reserve(static_cast<std::size_t>(ndof) * (grid.dim + 1));
  for (Index i = 0; i < ndof; ++i) {
    const auto j = grid.coords(i);
    double diag = field.b[i];
    for (int d = 0; d < grid.dim; ++d) {
      auto lo = j;
      lo[d] -= 1;
      const double a_lo = field.a_at(d, lo);
      const double a_hi = field.a_at(d, j);
      diag += (a_lo + a_hi) * inv_h2;
      if (j[d] + 1 <= grid.n - 1) {
        auto nb = j;
        nb[d] += 1;
        trip.push_back({i, grid.index(nb), -a_hi * inv_h2});
      }
    }
    trip.push_back({i, i, diag});
  }
  return SparseSymMatrix::from_triplets(ndof, trip);
}

// --------------------------------------------------------------------------
// Benchmark problems

int example_dim(int example_id) {
  if (example_id >= 1 && example_id <= 3) return 2;
  if (example_id >= 4 && example_id <= 6) return 3;
  throw std::invalid_argument("example id must be 1..6");
}

bool example_is_spd(int example_id) {
  return example_id != 3 && example_id != 6;
}

double default_kappa(int example_id, int n) {
  // fixed resolution: 32 DOFs per wavelength in 2D, 8 in 3D
  return example_dim(example_id) == 2 ? n / 32.0 : n / 8.0;
}

ProblemSpec make_problem(int example_id, int n, int m, std::uint64_t seed,
                         std::optional<double> kappa) {
  ProblemSpec p;
  p.example_id = example_id;
  p.seed = seed;
  p.grid = build_grid(example_dim(example_id), n, m);
  switch (example_id) {
    case 1:
    case 4:
      p.field = constant_field(p.grid, 1.0, 0.0);
      break;
    case 2:
    case 5:
      p.field = high_contrast_field(p.grid, seed);
      break;
    case 3:
    case 6: {
      const double waves = kappa.value_or(default_kappa(example_id, n));
      const double k = 2.0 * std::numbers::pi * waves;
      p.field = constant_field(p.grid, 1.0, -k * k);
      p.field.wave_number = k;
      break;
    }
    default:
      throw std::invalid_argument("example id must be 1..6");
  }
  return p;
}

void write_field_csv(std::ostream& out, const GridConfig& grid,
                     const CoeffField& field) {
  out << "field,ix,iy,iz,value\n";
  out.precision(17);
  for (int axis = 0; axis < grid.dim; ++axis) {
    for (std::size_t s = 0; s < field.a[axis].size(); ++s) {
      const auto x = half_lattice_point(axis, staggered_coords(grid, axis, s));
      out << 'a' << ',' << x[0] << ',' << x[1] << ',' << x[2] << ','
          << field.a[axis][s] << '\n';
    }
  }
  for (Index i = 0; i < grid.num_dofs(); ++i) {
    const auto j = grid.coords(i);
    out << 'b' << ',' << 2 * j[0] << ',' << 2 * j[1] << ',' << 2 * j[2] << ','
        << field.b[i] << '\n';
  }
}

}  // namespace hifde
