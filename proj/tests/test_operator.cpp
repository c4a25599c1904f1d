#include "doctest.h"

#include "posg/operator.hpp"

using namespace posg;

namespace {

MatD weighted_adjoint(const WeightedSpace& space, const MatD& t) {
  const VecD& w = space.weights();
  return w.cwiseInverse().asDiagonal() * t.transpose() * w.asDiagonal();
}

}  // namespace

TEST_CASE("dense and sparse kernels agree") {
  const WeightedSpace space = WeightedSpace::counting(3);
  MatD m(3, 3);
  m << 0.5, 0.0, 1.0, 0.5, 0.25, 0.0, 0.0, 0.75, 0.0;
  const auto dense = PositiveOperator::dense(space, m);
  const auto sparse = PositiveOperator::sparse(space, SparseD(m.sparseView()));
  const VecD f = (VecD(3) << 1.0, -2.0, 3.0).finished();
  CHECK((apply(dense, f) - m * f).isZero(1e-15));
  CHECK((apply(sparse, f) - m * f).isZero(1e-15));
  CHECK(materialize(sparse) == m);
  CHECK(is_markov(dense));
}

TEST_CASE("rank-one, diagonal, transport") {
  const WeightedSpace space((VecD(3) << 1.0, 2.0, 4.0).finished());
  const Functional phi{(VecD(3) << 1.0, 0.5, 0.25).finished()};
  const VecD v = (VecD(3) << 0.0, 1.0, 2.0).finished();
  const auto r = PositiveOperator::rank_one(space, phi, v);
  const VecD f = (VecD(3) << 1.0, 1.0, 1.0).finished();
  // <phi, f> = 1 * 1 + 0.5 * 2 + 0.25 * 4 = 3
  CHECK((apply(r, f) - 3.0 * v).isZero(1e-15));

  const auto d = PositiveOperator::diagonal(space, (VecD(3) << 2.0, 0.0, 1.0).finished());
  CHECK(apply(d, f) == (VecD(3) << 2.0, 0.0, 1.0).finished());

  const auto t = PositiveOperator::transport(space, {2, 2, 0}, (VecD(3) << 1.0, 2.0, 3.0).finished());
  CHECK(apply(t, f) == (VecD(3) << 3.0, 0.0, 3.0).finished());
}

TEST_CASE("shift tracks escaped mass") {
  const WeightedSpace space((VecD(3) << 1.0, 0.5, 0.25).finished());
  const auto s = PositiveOperator::right_shift(space, 0.125);
  const auto out = apply_tracked(s, VecD((VecD(3) << 1.0, 2.0, -4.0).finished()));
  CHECK(out.image == (VecD(3) << 0.0, 1.0, 2.0).finished());
  CHECK(out.escaped == doctest::Approx(0.5));
  CHECK(column_leak(s)(2) == doctest::Approx(0.125 / 0.25));
}

TEST_CASE("compose applies the last factor first") {
  const WeightedSpace space = WeightedSpace::counting(3);
  MatD a = MatD::Random(3, 3).cwiseAbs();
  MatD b = MatD::Random(3, 3).cwiseAbs();
  const auto op = PositiveOperator::compose(
      {PositiveOperator::dense(space, a), PositiveOperator::dense(space, b)});
  CHECK((materialize(op) - a * b).cwiseAbs().maxCoeff() < 1e-14);
  const auto sum = PositiveOperator::sum({PositiveOperator::dense(space, a), PositiveOperator::dense(space, b)});
  CHECK((materialize(sum) - (a + b)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("adjoint matches the weighted transpose") {
  const WeightedSpace space((VecD(4) << 1.0, 0.3, 2.0, 0.7).finished());
  const MatD m = MatD::Random(4, 4).cwiseAbs();
  const auto op = PositiveOperator::dense(space, m);
  const Functional phi{VecD::Random(4)};
  const VecD expected = weighted_adjoint(space, m) * phi.coefficients;
  CHECK((adjoint_apply(op, phi).coefficients - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("weighted operator norm equals the column oracle") {
  const WeightedSpace space((VecD(3) << 1.0, 0.5, 3.0).finished());
  const MatD m = MatD::Random(3, 3).cwiseAbs();
  double oracle = 0.0;
  for (Index j = 0; j < 3; ++j) {
    double col = 0.0;
    for (Index i = 0; i < 3; ++i) col += space.weight(i) * m(i, j);
    oracle = std::max(oracle, col / space.weight(j));
  }
  CHECK(weighted_operator_norm(PositiveOperator::dense(space, m)) == doctest::Approx(oracle));
}

TEST_CASE("Markov with non-uniform weights") {
  const VecD w = (VecD(2) << 1.0, 3.0).finished();
  const WeightedSpace space(w);
  MatD s(2, 2);
  s << 0.25, 0.5, 0.75, 0.5;
  // Column-stochastic s conjugated by the weights.
  const MatD t = w.cwiseInverse().asDiagonal() * s * w.asDiagonal();
  CHECK(is_markov(PositiveOperator::dense(space, t)));
  CHECK_FALSE(is_markov(PositiveOperator::dense(space, s)));
  CHECK_FALSE(is_markov(PositiveOperator::dense(WeightedSpace(w, 2.0), t)));
}

TEST_CASE("factories reject negative or non-finite entries") {
  const WeightedSpace space = WeightedSpace::counting(2);
  MatD m = MatD::Ones(2, 2);
  m(0, 1) = -0.1;
  CHECK_THROWS_AS(PositiveOperator::dense(space, m), InvalidArgument);
  CHECK_THROWS_AS(PositiveOperator::diagonal(space, (VecD(2) << 1.0, NAN).finished()),
                  InvalidArgument);
  CHECK_THROWS_AS(PositiveOperator::dense(WeightedSpace::counting(3), MatD::Ones(2, 2)),
                  DimensionError);
  const auto exempt = PositiveOperator::exempt_dense(space, m);
  CHECK(exempt.positivity_exempt());
  CHECK_FALSE(is_markov(exempt));
}

TEST_CASE("structural lattice-homomorphism tests") {
  const WeightedSpace space = WeightedSpace::counting(3);
  const auto transport = PositiveOperator::transport(space, {1, 1, 0}, VecD::Ones(3));
  CHECK(adjoint_is_lattice_homomorphism(transport));
  CHECK_FALSE(is_lattice_homomorphism(transport));

  // A stored zero is not a structural entry.
  std::vector<Triplet> entries = {{0, 0, 1.0}, {0, 1, 0.0}, {1, 2, 2.0}};
  const auto sparse = PositiveOperator::sparse(space, entries);
  CHECK(is_lattice_homomorphism(sparse));
  CHECK(structural_pattern(sparse).max_per_row() == 1);

  const auto dense = PositiveOperator::dense(space, MatD::Ones(3, 3));
  CHECK_FALSE(is_lattice_homomorphism(dense));
  CHECK_FALSE(adjoint_is_lattice_homomorphism(dense));
}

TEST_CASE("interval-preservation witness") {
  const WeightedSpace space = WeightedSpace::counting(4);
  const auto op = PositiveOperator::transport(space, {0, 0, 1, 1}, (VecD(4) << 1.0, 2.0, 0.5, 1.0).finished());
  const VecD f = VecD::Zero(4);
  const VecD g = VecD::Ones(4);
  const VecD y = (VecD(4) << 2.5, 1.0, 0.0, 0.0).finished();
  const VecD x = interval_preservation_witness(op, f, g, y);
  CHECK((apply(op, x) - y).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((x.array() >= f.array()).all());
  CHECK((x.array() <= g.array()).all());

  CHECK_THROWS_AS(interval_preservation_witness(op, f, g, VecD((VecD(4) << 4.0, 0, 0, 0).finished())),
                  InfeasibleTarget);
  const auto dense = PositiveOperator::dense(space, MatD::Ones(4, 4));
  CHECK_THROWS_AS(interval_preservation_witness(dense, f, g, y), StructuralGateError);
}
