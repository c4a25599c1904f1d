#include "doctest.h"

#include "posg/frobenius_perron.hpp"
#include "posg/gallery.hpp"

#include <cmath>
#include <random>

using namespace posg;

TEST_CASE("doubling map Ulam columns") {
  for (int k : {2, 5, 8}) {
    const Index n = Index{1} << k;
    const auto op = ulam_matrix(IntervalMap::doubling(), n);
    CHECK_FALSE(op.approximate());
    CHECK(is_markov(op));
    const MatD t = materialize(op);
    for (Index j = 0; j < n; ++j) {
      CHECK(t(2 * j % n, j) == 0.5);
      CHECK(t((2 * j + 1) % n, j) == 0.5);
      CHECK((t.col(j).array() != 0.0).count() == 2);
    }
    CHECK(is_measure_preserving(op));
  }
}

TEST_CASE("identity map Ulam matrix") {
  const MatD t = materialize(ulam_matrix(IntervalMap::identity(), 7));
  CHECK(t == MatD::Identity(7, 7));
}

TEST_CASE("tent map invariant density is uniform") {
  const auto op = ulam_matrix(IntervalMap::tent(), 64);
  CHECK_FALSE(op.approximate());
  const VecD density = invariant_density(op, 1e-14);
  CHECK((density - VecD::Ones(64)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("off-grid branches are flagged approximate") {
  // x -> 3x mod 1 has breakpoints at 1/3, not on a dyadic grid.
  const IntervalMap triple({AffineBranch{0.0, 0.25, 2.0, 0.0}, AffineBranch{0.25, 1.0, 4.0 / 3.0, -1.0 / 3.0}});
  const auto op = ulam_matrix(triple, 8);
  CHECK(op.approximate());
  CHECK(is_markov(op, 1e-12));
}

TEST_CASE("callable branches need a preimage quadrature") {
  CallableBranch bare{0.0, 1.0, [](double x) { return x * x; }, {}};
  CHECK_THROWS_AS(ulam_matrix(IntervalMap({bare}), 4), UnsupportedBranch);

  CallableBranch square{0.0, 1.0, [](double x) { return x * x; },
                        [](double lo, double hi, double c, double d) {
                          const double a = std::max(lo, std::sqrt(c));
                          const double b = std::min(hi, std::sqrt(d));
                          return b > a ? b - a : 0.0;
                        }};
  const auto op = ulam_matrix(IntervalMap({square}), 8);
  CHECK(op.approximate());
  CHECK(is_markov(op, 1e-12));
}

TEST_CASE("interval maps validate their branches") {
  CHECK_THROWS_AS(IntervalMap({AffineBranch{0.0, 0.5, 2.0, 0.0}}), InvalidArgument);
  CHECK_THROWS_AS(IntervalMap({AffineBranch{0.0, 1.0, 0.0, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(IntervalMap({AffineBranch{0.0, 1.0, 2.0, 0.0}}), InvalidArgument);
  CHECK(IntervalMap::doubling()(0.75) == 0.5);
}

TEST_CASE("transfer operators of finite maps") {
  const auto two = fp_of_finite_map({{0, 0}, WeightedSpace::counting(2)});
  CHECK(materialize(two) == (MatD(2, 2) << 1, 1, 0, 0).finished());
  CHECK_FALSE(is_measure_preserving(two));
  CHECK(apply(two, VecD(VecD::Ones(2))) == (VecD(2) << 2.0, 0.0).finished());

  const auto id = fp_of_finite_map({{0, 1, 2}, WeightedSpace::counting(3)});
  CHECK(materialize(id) == MatD::Identity(3, 3));

  const auto cyc = fp_of_finite_map({{1, 2, 3, 0}, WeightedSpace::counting(4)});
  CHECK(is_measure_preserving(cyc));
  CHECK(is_lattice_homomorphism(cyc));
  CHECK_THROWS_AS(invariant_density(cyc), NonConvergence);
}

TEST_CASE("finite transfer operators are Markov with lattice-homomorphic adjoint") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 9;
    std::uniform_int_distribution<Index> pick(0, n - 1);
    VecD w(n);
    std::vector<Index> sigma(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      w(i) = u(rng);
      sigma[static_cast<std::size_t>(i)] = pick(rng);
    }
    const auto op = fp_of_finite_map({sigma, WeightedSpace(w)});
    CHECK(is_markov(op));
    CHECK(adjoint_is_lattice_homomorphism(op));

    // The Koopman operator composes with sigma.
    VecD g(n);
    for (Index i = 0; i < n; ++i) g(i) = u(rng) - 1.0;
    const VecD kg = apply(koopman(op), g);
    for (Index j = 0; j < n; ++j) CHECK(kg(j) == doctest::Approx(g(sigma[static_cast<std::size_t>(j)])));
    const VecD f = VecD::Random(n);
    CHECK(std::abs(pair(op.space(), Functional{kg}, f) - pair(op.space(), Functional{g}, apply(op, f))) < 1e-12);
  }
}

TEST_CASE("Koopman operator of the doubling Ulam matrix is its transpose") {
  const auto op = ulam_matrix(IntervalMap::doubling(), 32);
  CHECK(materialize(koopman(op)) == MatD(materialize(op).transpose()));
}

TEST_CASE("invariant density of a primitive chain matches the eigen oracle") {
  std::mt19937_64 rng(21);
  for (Index n : {3, 10, 25}) {
    const MatD t = random_primitive_stochastic(n, rng);
    const auto op = PositiveOperator::dense(WeightedSpace::counting(n), t);
    CHECK((invariant_density(op) - perron_vector_oracle(t)).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK_THROWS_AS(invariant_density(PositiveOperator::dense(WeightedSpace::counting(2), MatD::Ones(2, 2))),
                  InvalidArgument);
}
