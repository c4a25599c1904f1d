#include "doctest.h"

#include "posg/gallery.hpp"
#include "posg/lower_bounds.hpp"

#include <random>

using namespace posg;

namespace {

Semigroup primitive(Index n, std::uint64_t seed, MatD* matrix = nullptr) {
  std::mt19937_64 rng(seed);
  const MatD t = random_primitive_stochastic(n, rng);
  if (matrix) *matrix = t;
  return Semigroup::discrete(PositiveOperator::dense(WeightedSpace::counting(n), t));
}

}  // namespace

TEST_CASE("uniform lower bound below the stationary density certifies") {
  MatD t;
  const Semigroup s = primitive(7, 11, &t);
  const VecD pi = perron_vector_oracle(t);
  const auto ok = uniform_lower_bound_check(s, 0.5 * pi);
  CHECK(ok.certified);
  CHECK(ok.norm_of_bound == doctest::Approx(0.5));
  // Above the stationary density the deficiency converges to ||h - pi|| > 0.
  const auto bad = uniform_lower_bound_check(s, 2.0 * pi);
  CHECK_FALSE(bad.certified);
  CHECK(bad.deficiency_trace.back().second == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("individual bound of a periodic orbit is zero") {
  const Semigroup s = build_cyclic_permutation(3);
  const auto r = individual_lower_bound_estimate(s, unit<double>(3, 1));
  CHECK(r.certified);
  CHECK(r.norm_of_bound == 0.0);
}

TEST_CASE("individual bound of a primitive chain approaches the stationary density") {
  MatD t;
  const Semigroup s = primitive(5, 12, &t);
  const VecD f = unit<double>(5, 2);
  const auto r = individual_lower_bound_estimate(s, f, 200, 0.95);
  CHECK(r.certified);
  CHECK_FALSE(r.fell_back_to_zero);
  CHECK((r.bound - 0.95 * perron_vector_oracle(t)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("maximal lower bound of example-4-3 is (1 - c) e_0") {
  const Semigroup s = build_example_4_3(128);
  const auto r = maximal_lower_bound_estimate(s, unit<double>(128, 1), 64);
  const double c = to_double(example_4_3_c(200));
  CHECK(r.bound(0) == doctest::Approx(1.0 - c).epsilon(1e-9));
  CHECK(r.bound.tail(127).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Lasota-Yorke needs a certified non-zero bound") {
  MatD t;
  const Semigroup s = primitive(4, 13, &t);
  CHECK_THROWS_AS(lasota_yorke_certify(s, VecD::Zero(4)), PreconditionNotCertified);
  CHECK_THROWS_AS(lasota_yorke_certify(s, 3.0 * perron_vector_oracle(t)), PreconditionNotCertified);
  const auto r = lasota_yorke_certify(s, 0.5 * perron_vector_oracle(t));
  CHECK(r.conclusion == ConclusionStatus::verified);
  CHECK((*r.fixed_vector - perron_vector_oracle(t)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("individual-bounds theorem in both directions on a block chain") {
  std::mt19937_64 rng(14);
  const MatD t = random_block_stochastic({3, 4}, rng);
  const Semigroup s = Semigroup::discrete(PositiveOperator::dense(WeightedSpace::counting(7), t));
  const auto r = individual_bounds_certify(s, 0.5);
  CHECK(r.hypothesis == HypothesisStatus::holds);
  CHECK(r.conclusion == ConclusionStatus::verified);
  CHECK(r.converse == ConclusionStatus::verified);
  CHECK(r.convergence->rank == 2);

  // example-4-3: bounds exist but their floor sits far below eps.
  const auto ex = individual_bounds_certify(build_example_4_3(32), 0.01, 24);
  CHECK(ex.hypothesis == HypothesisStatus::fails);
  CHECK(ex.conclusion == ConclusionStatus::not_applicable);
  CHECK_FALSE(ex.convergence->converged);
}

TEST_CASE("domination transfer") {
  MatD t;
  const Semigroup s = primitive(5, 15, &t);
  const auto same = domination_transfer(s, s);
  CHECK(same.hypothesis == HypothesisStatus::holds);
  CHECK(same.conclusion == ConclusionStatus::verified);

  // A dominated limit with a vanishing column gives no eps > 0.
  const Semigroup sub = build_example_5_4(8);
  MatD big = MatD::Constant(8, 8, 1.0 / 8.0);
  const Semigroup dom = Semigroup::discrete(PositiveOperator::dense(WeightedSpace::counting(8), big));
  const auto r = domination_transfer(dom, sub, 200, 1e-9);
  CHECK(r.conclusion != ConclusionStatus::violated);
}

TEST_CASE("Ding gate and certification") {
  MatD t;
  CHECK_THROWS_AS(ding_certify(primitive(4, 16, &t)), StructuralGateError);
  const auto r = ding_certify(build_collapse_map(10));
  CHECK(r.conclusion == ConclusionStatus::verified);
  const auto cyclic = ding_certify(build_cyclic_permutation(3));
  // Periodic orbits: bounds exist but the hypothesis cannot hold with convergence.
  CHECK(cyclic.conclusion != ConclusionStatus::violated);
  CHECK(cyclic.conclusion != ConclusionStatus::verified);
}

TEST_CASE("lattice-homomorphism rigidity") {
  const auto id = lattice_homo_rigidity(build_identity(5));
  CHECK(id.conclusion == ConclusionStatus::verified);
  CHECK(id.converse == ConclusionStatus::verified);
  const auto cyc = lattice_homo_rigidity(build_cyclic_permutation(4));
  CHECK(cyc.conclusion != ConclusionStatus::violated);
  CHECK_THROWS_AS(lattice_homo_rigidity(build_collapse_map(5)), StructuralGateError);
}

TEST_CASE("psi-weighted bounds on example-6-6 decline the prediction") {
  const Example66 ex = build_example_6_6(64, 2.0);
  const auto r = psi_lower_bound_certify(ex.native, unit<double>(64, 0), ex.psi, VecD::Ones(64), 48);
  CHECK(r.conclusion != ConclusionStatus::verified);
  CHECK(r.conclusion != ConclusionStatus::violated);
  bool flagged = false;
  for (const auto& note : r.notes) flagged |= note.find("missing f0") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("vertex normalization") {
  const WeightedSpace space((VecD(3) << 1.0, 2.0, 4.0).finished());
  const MatD v = normalized_vertices(space);
  for (Index j = 0; j < 3; ++j) CHECK(al_norm(space, VecD(v.col(j))) == doctest::Approx(1.0));
  const Functional psi{(VecD(3) << 1.0, 0.5, 2.0).finished()};
  const MatD vp = normalized_vertices(space, Norm::weighted_by(psi));
  for (Index j = 0; j < 3; ++j) CHECK(pair(space, psi, VecD(vp.col(j))) == doctest::Approx(1.0));
}
