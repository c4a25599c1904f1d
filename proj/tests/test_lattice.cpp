#include "doctest.h"

#include "posg/lattice.hpp"

using namespace posg;

TEST_CASE("weighted l1 norm and pairing") {
  const WeightedSpace space((VecD(3) << 1.0, 0.5, 0.25).finished());
  const VecD f = (VecD(3) << 2.0, -4.0, 8.0).finished();
  CHECK(al_norm(space, f) == doctest::Approx(2.0 + 2.0 + 2.0));
  CHECK(space.total_mass() == doctest::Approx(1.75));

  const Functional ones = Functional::norm_functional(3);
  const VecD g = f.cwiseAbs();
  // The norm functional pairs to the norm on the positive cone.
  CHECK(pair(space, ones, g) == doctest::Approx(al_norm(space, g)));
}

TEST_CASE("compensated summation keeps small terms") {
  const VecD terms = (VecD(4) << 1e16, 1.0, -1e16, 1.0).finished();
  CHECK(compensated_sum(terms) == 2.0);
}

TEST_CASE("p-norm with weights") {
  const WeightedSpace space((VecD(2) << 1.0, 4.0).finished(), 2.0);
  const VecD f = (VecD(2) << 3.0, 2.0).finished();
  CHECK(p_norm(space, f) == doctest::Approx(std::sqrt(9.0 + 16.0)));
  CHECK_FALSE(space.is_al());
  CHECK(space_norm(space, f) == doctest::Approx(5.0));
}

TEST_CASE("lattice operations") {
  const VecD f = (VecD(4) << 1.0, -2.0, 0.0, 3.5).finished();
  const VecD g = (VecD(4) << 0.5, 1.0, -1.0, 4.0).finished();
  const auto d = decompose(f);
  CHECK((d.pos - d.neg - f).isZero(0.0));
  CHECK((d.pos.array() >= 0.0).all());
  CHECK((d.neg.array() >= 0.0).all());
  CHECK(join(f, g) == (VecD(4) << 1.0, 1.0, 0.0, 4.0).finished());
  CHECK(meet(f, g) == (VecD(4) << 0.5, -2.0, -1.0, 3.5).finished());
  CHECK(negative_part(f) == (VecD(4) << 0.0, 2.0, 0.0, 0.0).finished());
}

TEST_CASE("deficiency vanishes exactly when f >= h") {
  const WeightedSpace space = WeightedSpace::counting(3);
  const VecD h = (VecD(3) << 0.2, 0.2, 0.2).finished();
  CHECK(deficiency(space, VecD((VecD(3) << 0.3, 0.2, 1.0).finished()), h) == 0.0);
  CHECK(deficiency(space, VecD((VecD(3) << 0.1, 0.2, 0.0).finished()), h) ==
        doctest::Approx(0.3));
}

TEST_CASE("psi norm and vertices") {
  const WeightedSpace space((VecD(3) << 2.0, 1.0, 0.5).finished());
  const Functional psi{(VecD(3) << 1.0, 2.0, 4.0).finished()};
  const VecD f = (VecD(3) << 1.0, -1.0, 1.0).finished();
  CHECK(psi_norm(space, f, psi) == doctest::Approx(2.0 + 2.0 + 2.0));
  CHECK(norm(space, f, Norm::weighted_by(psi)) == doctest::Approx(6.0));
  for (Index j = 0; j < 3; ++j) CHECK(al_norm(space, vertex(space, j)) == doctest::Approx(1.0));
}

TEST_CASE("exact rational space") {
  const RationalSpace space((VecQ(2) << Rational(1) / 3, Rational(2) / 3).finished());
  const VecQ f = (VecQ(2) << Rational(3), Rational(-3, 2)).finished();
  CHECK(al_norm(space, f) == Rational(2));
  CHECK(space.total_mass() == Rational(1));
}

TEST_CASE("invalid spaces are rejected") {
  CHECK_THROWS_AS(WeightedSpace((VecD(2) << 1.0, 0.0).finished()), InvalidArgument);
  CHECK_THROWS_AS(WeightedSpace((VecD(2) << 1.0, -1.0).finished()), InvalidArgument);
  CHECK_THROWS_AS(WeightedSpace(VecD::Ones(2), 0.5), InvalidArgument);
  const WeightedSpace space = WeightedSpace::counting(2);
  CHECK_THROWS_AS(al_norm(space, VecD(VecD::Ones(3))), DimensionError);
}
