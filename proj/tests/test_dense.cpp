#include <doctest.h>

#include "hifde/dense.hpp"
#include "oracle.hpp"
#include "properties.hpp"

using namespace hifde;
using Eigen::MatrixXd;

namespace {

MatrixXd reconstruct_via_oracle(const LdlFactor& f) {
  const MatrixXd p = oracle::permutation(f.perm);
  const MatrixXd l = oracle::unit_lower(f);
  return p * l * oracle::block_diag(f) * l.transpose() * p.transpose();
}

}  // namespace

TEST_CASE("ldl of small blocks") {
  MatrixXd a(2, 2);
  a << 4, 2, 2, 3;
  const LdlFactor f = ldl(a, true);
  CHECK(f.mode == LdlMode::kCholesky);
  CHECK(f.diag[0] == doctest::Approx(4.0));
  CHECK(f.diag[1] == doctest::Approx(2.0));
  CHECK((reconstruct_via_oracle(f) - a).norm() <= 1e-14);

  MatrixXd one(1, 1);
  one << 5.0;
  CHECK(ldl(one, true).diag[0] == doctest::Approx(5.0));
  CHECK(ldl(one, false).diag[0] == 5.0);

  // empty block is a valid no-op
  CHECK(ldl(MatrixXd(0, 0), true).size() == 0);
}

TEST_CASE("ldl reports indefinite and singular blocks") {
  MatrixXd indef(2, 2);
  indef << 1, 0, 0, -1;
  try {
    ldl(indef, true);
    FAIL("expected a factorization error");
  } catch (const FactorizationError& e) {
    CHECK(e.kind() == FactorizationError::Kind::kIndefinite);
  }
  const LdlFactor f = ldl(indef, false);
  CHECK((reconstruct_via_oracle(f) - indef).norm() <= 1e-15);

  MatrixXd sing(2, 2);
  sing << 1, 1, 1, 1;
  try {
    ldl(sing, false);
    FAIL("expected a factorization error");
  } catch (const FactorizationError& e) {
    CHECK(e.kind() == FactorizationError::Kind::kSingular);
  }
  CHECK_THROWS_AS(ldl(MatrixXd::Zero(3, 3), false), FactorizationError);
}

TEST_CASE("pivoted ldl uses a 2x2 block for a zero diagonal") {
  MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  const LdlFactor f = ldl(a, false);
  CHECK(f.block_size[0] == 2);
  CHECK(f.block_size[1] == 0);
  CHECK((reconstruct_via_oracle(f) - a).norm() <= 1e-15);
  CHECK((f.reconstruct() - a).norm() <= 1e-15);
  CHECK(f.stored_values() == 1u + 2u + 1u);
}

TEST_CASE("ldl on a random 20x20 indefinite and a conditioned SPD block") {
  const MatrixXd a = oracle::random_symmetric(20, 8);
  const LdlFactor f = ldl(a, false);
  CHECK((reconstruct_via_oracle(f) - a).norm() <= 1e-12 * a.norm());

  const MatrixXd s = oracle::random_spd(20, 1e6, 9);
  const LdlFactor g = ldl(s, true);
  CHECK((reconstruct_via_oracle(g) - s).norm() <= 1e-12 * s.norm());
  CHECK((g.diag.array() > 0).all());
}

TEST_CASE("factor solve and apply routines match the explicit factors") {
  const MatrixXd a = oracle::random_symmetric(12, 21);
  const LdlFactor f = ldl(a, false);
  const MatrixXd p = oracle::permutation(f.perm);
  const MatrixXd l = oracle::unit_lower(f);
  const MatrixXd d = oracle::block_diag(f);
  const MatrixXd x = oracle::random_symmetric(12, 22).leftCols(4);
  auto check = [&](auto op, const MatrixXd& expect) {
    MatrixXd y = x;
    op(y);
    CHECK((y - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
  };
  check([&](MatrixXd& y) { f.solve_lower(y); }, l.inverse() * p.transpose() * x);
  check([&](MatrixXd& y) { f.solve_upper(y); }, p * l.transpose().inverse() * x);
  check([&](MatrixXd& y) { f.solve_diag(y); }, d.inverse() * x);
  check([&](MatrixXd& y) { f.apply_lower(y); }, p * l * x);
  check([&](MatrixXd& y) { f.apply_upper(y); }, l.transpose() * p.transpose() * x);
  check([&](MatrixXd& y) { f.apply_diag(y); }, d * x);
  CHECK((f.diag_matrix() - d).norm() == 0.0);
}

TEST_CASE("interpolative decomposition examples") {
  MatrixXd rank1(2, 2);
  rank1 << 1, 2, 2, 4;
  const IdResult a = interpolative_decomposition(rank1, 1e-6);
  CHECK(a.rank == 1);
  CHECK(a.skeleton == std::vector<Index>{1});
  CHECK(a.redundant == std::vector<Index>{0});
  CHECK(a.interp(0, 0) == doctest::Approx(0.5));

  const IdResult b = interpolative_decomposition(MatrixXd::Identity(3, 3), 1e-6);
  CHECK(b.rank == 3);
  CHECK(b.redundant.empty());
  CHECK(b.interp.cols() == 0);

  const MatrixXd low = props::random_low_rank(30, 25, 5, 3);
  const IdResult c = interpolative_decomposition(low, 1e-9);
  CHECK(c.rank == 5);
  const Eigen::JacobiSVD<MatrixXd> svd(low);
  const auto sv = svd.singularValues();
  int svd_rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) svd_rank += sv[i] > 1e-9 * sv[0];
  CHECK(svd_rank == c.rank);

  CHECK(interpolative_decomposition(low, 1.0).rank == 0);
  const IdResult z = interpolative_decomposition(MatrixXd::Zero(4, 3), 1e-6);
  CHECK(z.rank == 0);
  CHECK(z.redundant.size() == 3u);

  // no rows: nothing to preserve
  CHECK(interpolative_decomposition(MatrixXd(0, 4), 1e-6).rank == 0);
}

TEST_CASE("schur complement examples") {
  MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const MatrixXd app = a.topLeftCorner(1, 1);
  const MatrixXd aqp = a.bottomLeftCorner(2, 1);
  const MatrixXd aqq = a.bottomRightCorner(2, 2);
  const MatrixXd s = schur_complement(aqq, aqp, ldl(app, true));
  CHECK(s(0, 0) == doctest::Approx(3.0 - 0.25));
  CHECK(s(0, 1) == doctest::Approx(1.0));
  CHECK(s(1, 1) == doctest::Approx(2.0));

  const MatrixXd spd = oracle::random_spd(15, 100.0, 4);
  const MatrixXd ref = spd.bottomRightCorner(9, 9) -
                       spd.bottomLeftCorner(9, 6) * spd.topLeftCorner(6, 6).inverse() *
                           spd.bottomLeftCorner(9, 6).transpose();
  const MatrixXd got = schur_complement(spd.bottomRightCorner(9, 9), spd.bottomLeftCorner(9, 6),
                                        ldl(spd.topLeftCorner(6, 6), true));
  CHECK((got - ref).norm() <= 1e-12 * spd.norm());
}

TEST_CASE("interpolative decomposition properties") {
  const props::SuiteResult r = props::id_suite(200);
  INFO(r.summary());
  CHECK(r.ok());
}

TEST_CASE("ldl and schur complement properties") {
  const props::SuiteResult r = props::ldl_suite(200);
  INFO(r.summary());
  CHECK(r.ok());
}
