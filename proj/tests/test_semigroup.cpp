#include "doctest.h"

#include "posg/gallery.hpp"
#include "posg/semigroup.hpp"

#include <cmath>
#include <random>

using namespace posg;

TEST_CASE("uniformization matches the closed-form two-state exponential") {
  const double a = 0.7;
  const double b = 1.9;
  MatD q(2, 2);
  q << -a, b, a, -b;
  const Semigroup s = Semigroup::continuous(WeightedSpace::counting(2), q);
  MatD p_inf(2, 2);
  p_inf << b, b, a, a;
  p_inf /= a + b;
  for (double t : {0.1, 0.5, 1.0, 3.7, 40.0}) {
    const MatD expected = p_inf + std::exp(-(a + b) * t) * (MatD::Identity(2, 2) - p_inf);
    CHECK((materialize(evaluate(s, t)) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(s.conservative());
}

TEST_CASE("discrete evaluation is the matrix power") {
  std::mt19937_64 rng(1);
  const MatD t = random_primitive_stochastic(5, rng);
  const Semigroup s = Semigroup::discrete(PositiveOperator::dense(WeightedSpace::counting(5), t));
  MatD power = MatD::Identity(5, 5);
  for (int k = 0; k < 7; ++k) power = t * power;
  CHECK((materialize(evaluate(s, 7)) - power).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(evaluate(s, 0.0), InvalidArgument);
  CHECK_THROWS_AS(evaluate(s, 1.5), InvalidArgument);
}

TEST_CASE("rate matrices must be conservative or sub-conservative with positive off-diagonals") {
  MatD q(2, 2);
  q << -1.0, -0.5, 1.0, 0.5;
  CHECK_THROWS_AS(Semigroup::continuous(WeightedSpace::counting(2), q), InvalidArgument);
  q << -1.0, 0.5, 2.0, -0.5;
  CHECK_THROWS_AS(Semigroup::continuous(WeightedSpace::counting(2), q), InvalidArgument);
}

TEST_CASE("strong convergence of a primitive chain") {
  std::mt19937_64 rng(4);
  const MatD t = random_primitive_stochastic(6, rng);
  const Semigroup s = Semigroup::discrete(PositiveOperator::dense(WeightedSpace::counting(6), t));
  const auto r = detect_strong_convergence(s, 200, 1e-9);
  REQUIRE(r.converged);
  CHECK(r.rank == 1);
  const MatD oracle = rank_one_limit(perron_vector_oracle(t), s.space());
  CHECK((*r.limit - oracle).cwiseAbs().maxCoeff() < 1e-10);
  // The limit is a projection commuting with the semigroup.
  CHECK((*r.limit * *r.limit - *r.limit).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((t * *r.limit - *r.limit * t).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("periodic and trivial semigroups") {
  const auto cyclic = detect_strong_convergence(build_cyclic_permutation(3), 200, 1e-9);
  CHECK_FALSE(cyclic.converged);
  CHECK_FALSE(cyclic.limit.has_value());
  const auto id = detect_strong_convergence(build_identity(4), 50, 1e-9);
  CHECK(id.converged);
  CHECK(id.rank == 4);
  CHECK(*id.limit == MatD::Identity(4, 4));
}

TEST_CASE("convergence verdicts are monotone in the horizon") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const MatD t = random_primitive_stochastic(8, rng);
    const Semigroup s = Semigroup::discrete(PositiveOperator::dense(WeightedSpace::counting(8), t));
    const auto short_run = detect_strong_convergence(s, 100, 1e-9);
    const auto long_run = detect_strong_convergence(s, 200, 1e-9);
    if (short_run.converged) CHECK(long_run.converged);
    CHECK(long_run.residual_trace.back().second <= short_run.residual_trace.back().second + 1e-15);
  }
}

TEST_CASE("operator-norm convergence of the two-point map") {
  const Semigroup s = build_two_point_fp();
  const auto r = operator_norm_convergence(s, 20, 1e-9);
  CHECK(r.converged);
  CHECK(r.tail_residual == 0.0);
  CHECK(column_norm(s.space(), r.terminal - MatD::Identity(2, 2)) > 0.5);
}

TEST_CASE("operator-norm residual of the doubling Ulam matrix against a reference") {
  const GalleryInstance inst = make_instance("doubling-ulam", {.dim = 16});
  const auto r = operator_norm_convergence(inst.semigroup, 3, 1e-9, inst.reference_limit);
  CHECK_FALSE(r.converged);
  // ||T^n - P|| = 2 (1 - 2^(n - k)) for the 2^k-cell Ulam matrix.
  for (const auto& [t, v] : r.residual_trace) CHECK(v == doctest::Approx(2.0 * (1.0 - std::ldexp(1.0, static_cast<int>(t) - 4))));
}

TEST_CASE("orbit diagnostic in a chosen norm") {
  const Semigroup s = build_cyclic_permutation(4);
  const VecD f = unit<double>(4, 0);
  const auto r = detect_orbit_convergence(s, f, 40, 1e-9, Norm::al());
  CHECK_FALSE(r.converged);
  CHECK(r.tail_diameter == doctest::Approx(2.0));
  const auto fixed = detect_orbit_convergence(s, VecD(VecD::Ones(4)), 40, 1e-9, Norm::al());
  CHECK(fixed.converged);
}

TEST_CASE("embedded discrete semigroups") {
  std::mt19937_64 rng(9);
  const Semigroup s = Semigroup::continuous(WeightedSpace::counting(4), random_primitive_generator(4, rng));
  const auto r = embedded_discrete_consistency(s);
  CHECK(r.steps == default_embedded_steps());
  CHECK(r.embedded_limits_coincide);
  CHECK(r.agrees_with_continuous);
  CHECK(r.rank_one_shortcut);
  CHECK(r.rank_one_prediction_verified);
  CHECK_FALSE(r.discrepancy);

  CHECK_THROWS_AS(embedded_discrete_consistency(build_identity(2)), InvalidArgument);
  CHECK_THROWS_AS(embedded_discrete_consistency(s, {1.0, 1.0}), InvalidArgument);
}

TEST_CASE("rotation semigroup: embedded at the period converges, the full semigroup does not") {
  const Semigroup rot = build_rotation_semigroup(1.0);
  CHECK((materialize(evaluate(rot, 1.0)) - MatD::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((materialize(evaluate(rot, 0.5)) + MatD::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  const auto r = embedded_discrete_consistency(rot, {1.0, 0.5});
  CHECK(r.embedded[0].converged);
  CHECK(r.embedded[0].rank == 2);
  CHECK_FALSE(r.embedded[1].converged);
  CHECK_FALSE(r.continuous.converged);
  CHECK(r.discrepancy);
}
