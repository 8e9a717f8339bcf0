#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "hifde/grid.hpp"
#include "oracle.hpp"

using namespace hifde;

TEST_CASE("build_grid derives levels and step") {
  const GridConfig g = build_grid(2, 8, 2);
  CHECK(g.levels == 2);
  CHECK(g.h == doctest::Approx(1.0 / 8));
  CHECK(g.num_dofs() == 49);

  const GridConfig g3 = build_grid(3, 32, 4);
  CHECK(g3.levels == 3);
  CHECK(g3.h == doctest::Approx(1.0 / 32));
  CHECK(g3.num_dofs() == 29791);
}

TEST_CASE("build_grid rejects sizes not of the form 2^L m") {
  CHECK_THROWS_AS(build_grid(2, 12, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(2, 4, 4), std::invalid_argument);  // L = 0
  CHECK_THROWS_AS(build_grid(2, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(4, 8, 2), std::invalid_argument);
  CHECK_NOTHROW(build_grid(2, 24, 3));
}

TEST_CASE("grid coordinates round trip") {
  for (int dim : {2, 3}) {
    const GridConfig g = build_grid(dim, 8, 2);
    for (Index i = 0; i < g.num_dofs(); ++i) {
      const auto j = g.coords(i);
      for (int d = 0; d < dim; ++d) {
        CHECK(j[d] >= 1);
        CHECK(j[d] <= 7);
      }
      CHECK(g.index(j) == i);
    }
  }
  // first axis varies fastest
  const GridConfig g = build_grid(2, 8, 2);
  CHECK(g.index({2, 1, 0}) == 1);
  CHECK(g.index({1, 2, 0}) == 7);
}

TEST_CASE("constant fields") {
  const GridConfig g = build_grid(2, 8, 2);
  const CoeffField lap = constant_field(g, 1.0, 0.0);
  CHECK(std::all_of(lap.a[0].begin(), lap.a[0].end(), [](double v) { return v == 1.0; }));
  CHECK(std::all_of(lap.b.begin(), lap.b.end(), [](double v) { return v == 0.0; }));
  CHECK(lap.a[0].size() == 8u * 7u);

  const double k = 2.0 * std::numbers::pi * 4.0;
  const CoeffField helm = constant_field(g, 1.0, -k * k);
  CHECK(helm.b[0] == doctest::Approx(-631.65).epsilon(1e-5));

  const CoeffField two = constant_field(g, 2.0, 1.0);
  CHECK(two.a[1][5] == 2.0);
  CHECK(two.b[7] == 1.0);
}

TEST_CASE("high-contrast field is two-valued and split at the median") {
  for (std::uint64_t seed : {0ull, 1ull, 7ull}) {
    for (int dim : {2, 3}) {
      const GridConfig g = build_grid(dim, dim == 2 ? 32 : 16, 4);
      const CoeffField f = high_contrast_field(g, seed);
      std::size_t low = 0, high = 0;
      for (int d = 0; d < dim; ++d) {
        for (double v : f.a[d]) {
          if (v == 1e-2) {
            ++low;
          } else if (v == 1e2) {
            ++high;
          } else {
            FAIL("unexpected sample value " << v);
          }
        }
      }
      CHECK(low >= high);
      CHECK(low - high <= 1);
      REQUIRE(f.contrast_ratio.has_value());
      CHECK(*f.contrast_ratio == doctest::Approx(1e4));
    }
  }
}

TEST_CASE("random fields are reproducible for a fixed seed") {
  const GridConfig g = build_grid(2, 32, 4);
  const CoeffField f1 = high_contrast_field(g, 11);
  const CoeffField f2 = high_contrast_field(g, 11);
  CHECK(f1.a[0] == f2.a[0]);
  CHECK(f1.a[1] == f2.a[1]);
  const CoeffField f3 = high_contrast_field(g, 12);
  CHECK(f1.a[0] != f3.a[0]);
}

namespace {

// Lag-k autocorrelation along axis 0 of the axis-0 samples.
double autocorrelation(const GridConfig& g, const std::vector<double>& a, int lag) {
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean);
  var /= static_cast<double>(a.size());
  double cov = 0.0;
  std::size_t count = 0;
  const std::size_t lines = a.size() / static_cast<std::size_t>(g.n);
  for (std::size_t line = 0; line < lines; ++line) {
    for (int k = 0; k + lag < g.n; ++k) {
      const double x = a[line * g.n + k] - mean;
      const double y = a[line * g.n + k + lag] - mean;
      cov += x * y;
      ++count;
    }
  }
  return cov / static_cast<double>(count) / var;
}

}  // namespace

TEST_CASE("smoothing raises spatial correlation at lag 4h") {
  const GridConfig g = build_grid(2, 64, 4);
  const CoeffField raw = uniform_noise_field(g, 3);
  const CoeffField smooth = smoothed_noise_field(g, 3);
  const double raw_corr = autocorrelation(g, raw.a[0], 4);
  const double smooth_corr = autocorrelation(g, smooth.a[0], 4);
  CHECK(std::abs(raw_corr) < 0.1);
  CHECK(smooth_corr > 0.5);
  CHECK(smooth_corr > raw_corr);
  // normalized convolution of values in [0, 1] stays in [0, 1]
  for (double v : smooth.a[1]) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("assemble small stencils") {
  // a single interior point is below the smallest hierarchy, so the grid is
  // built by hand
  auto single = [](int dim) { return GridConfig{dim, 2, 2, 0, 0.5}; };
  {
    const GridConfig g = single(2);
    const SparseSymMatrix a = assemble(g, constant_field(g, 1.0, 0.0));
    REQUIRE(a.order() == 1);
    CHECK(a.at(0, 0) == 16.0);
  }
  {
    const GridConfig g = single(3);
    const SparseSymMatrix a = assemble(g, constant_field(g, 1.0, 0.0));
    REQUIRE(a.order() == 1);
    CHECK(a.at(0, 0) == 24.0);
  }
  {
    const GridConfig g = build_grid(2, 4, 2);
    const SparseSymMatrix a = assemble(g, constant_field(g, 1.0, 0.0));
    const Index center = g.index({2, 2, 0});
    CHECK(a.at(center, center) == 64.0);
    double sum = 0.0;
    int off = 0;
    for (const auto& e : a.row(center)) {
      sum += e.value;
      if (e.col != center) {
        CHECK(e.value == -16.0);
        ++off;
      }
    }
    CHECK(off == 4);
    CHECK(sum == 0.0);
  }
}

TEST_CASE("assembled matrices: symmetry, sparsity, row sums, definiteness") {
  for (int dim : {2, 3}) {
    const GridConfig g = build_grid(dim, dim == 2 ? 32 : 12, dim == 2 ? 4 : 3);
    for (std::uint64_t seed : {1ull, 2ull}) {
      const CoeffField f = seed == 1 ? high_contrast_field(g, seed)
                                     : uniform_noise_field(g, seed);
      const SparseSymMatrix a = assemble(g, f);
      const Index n = a.order();
      CHECK(a.num_stored() <= static_cast<std::size_t>((2 * dim + 1) * n));
      for (Index i = 0; i < n; ++i) {
        for (const auto& e : a.row(i)) CHECK(a.at(e.col, i) == e.value);
      }
      // interior rows have zero row sum
      for (Index i = 0; i < n; ++i) {
        const auto j = g.coords(i);
        bool interior = true;
        for (int d = 0; d < dim; ++d) interior = interior && j[d] > 1 && j[d] < g.n - 1;
        if (!interior) continue;
        double sum = 0.0;
        for (const auto& e : a.row(i)) sum += e.value;
        CHECK(std::abs(sum) <= 1e-13 * a.at(i, i));
      }
      // dense Cholesky as SPD oracle
      if (n <= 2000) {
        Eigen::LLT<Eigen::MatrixXd> llt(a.to_dense());
        CHECK(llt.info() == Eigen::Success);
      }
    }
  }
}

TEST_CASE("staggered coefficients enter the stencil") {
  const GridConfig g = build_grid(2, 4, 2);
  CoeffField f = uniform_noise_field(g, 5);
  for (double& v : f.b) v = 0.25;
  const SparseSymMatrix a = assemble(g, f);
  const double n2 = 16.0;
  for (Index i = 0; i < a.order(); ++i) {
    const auto j = g.coords(i);
    double diag = 0.25;
    for (int d = 0; d < 2; ++d) {
      auto lo = j;
      lo[d] -= 1;
      diag += (f.a_at(d, lo) + f.a_at(d, j)) * n2;
      if (j[d] + 1 <= 3) {
        auto nb = j;
        nb[d] += 1;
        CHECK(a.at(i, g.index(nb)) == doctest::Approx(-f.a_at(d, j) * n2));
      }
    }
    CHECK(a.at(i, i) == doctest::Approx(diag));
  }
}

TEST_CASE("benchmark problems") {
  CHECK(example_dim(1) == 2);
  CHECK(example_dim(6) == 3);
  CHECK_THROWS_AS(example_dim(7), std::invalid_argument);
  CHECK(example_is_spd(2));
  CHECK_FALSE(example_is_spd(3));
  CHECK(default_kappa(3, 256) == 8.0);
  CHECK(default_kappa(6, 32) == 4.0);

  const ProblemSpec p = make_problem(3, 64, 4, 0);
  REQUIRE(p.field.wave_number.has_value());
  CHECK(*p.field.wave_number == doctest::Approx(2.0 * std::numbers::pi * 2.0));
  CHECK(p.field.b[0] == doctest::Approx(-std::pow(4.0 * std::numbers::pi, 2)));

  const ProblemSpec p2 = make_problem(3, 64, 4, 0, 3.0);
  CHECK(*p2.field.wave_number == doctest::Approx(6.0 * std::numbers::pi));

  const ProblemSpec p5 = make_problem(5, 16, 4, 2);
  CHECK(p5.grid.dim == 3);
  CHECK(p5.field.contrast_ratio.has_value());
}

TEST_CASE("field CSV export") {
  const GridConfig g = build_grid(2, 4, 2);
  const CoeffField f = constant_field(g, 1.0, 0.5);
  std::ostringstream out;
  write_field_csv(out, g, f);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "field,ix,iy,iz,value");
  std::set<std::string> rows;
  int count = 0;
  while (std::getline(in, line)) {
    rows.insert(line);
    ++count;
  }
  CHECK(count == 2 * 4 * 3 + 9);
  CHECK(rows.size() == static_cast<std::size_t>(count));
  CHECK(rows.count("a,1,2,0,1") == 1);  // between (0,1) and (1,1)
  CHECK(rows.count("b,2,2,0,0.5") == 1);
}

TEST_CASE("uniform generator is in [0, 1) and seed dependent") {
  UniformRng r1(42), r2(42), r3(43);
  bool differ = false;
  for (int i = 0; i < 1000; ++i) {
    const double a = r1.next();
    CHECK(a >= 0.0);
    CHECK(a < 1.0);
    CHECK(a == r2.next());
    differ = differ || a != r3.next();
  }
  CHECK(differ);
}
