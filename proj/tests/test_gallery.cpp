#include "doctest.h"

#include "posg/gallery.hpp"

#include <cmath>

using namespace posg;

namespace {

/// Exact orbit of e_1 under the example-4-3 operator by repeated exact products.
VecQ exact_orbit(const MatQ& t, Index k) {
  VecQ f = VecQ::Zero(t.rows());
  f(1) = 1;
  for (Index i = 0; i < k; ++i) f = t * f;
  return f;
}

}  // namespace

TEST_CASE("example-4-3 vanishes on 1..k after k steps") {
  const Index n = 24;
  const MatQ t = example_4_3_matrix_exact(n);
  for (Index k = 1; k <= 8; ++k) {
    const VecQ f = exact_orbit(t, k);
    for (Index i = 1; i <= k; ++i) CHECK(f(i) == 0);
    Rational total = 0;
    for (Index i = 0; i < n; ++i) total += f(i);
    CHECK(total == 1);
  }
}

TEST_CASE("example-4-3 float and exact orbits agree") {
  const Index n = 40;
  const Semigroup s = build_example_4_3(n);
  const MatQ t = example_4_3_matrix_exact(n);
  VecD f = unit<double>(n, 1);
  for (Index k = 1; k <= 20; ++k) {
    f = apply(s.step_operator(), f);
    const VecQ exact = exact_orbit(t, k);
    for (Index i = 0; i < n; ++i) CHECK(std::abs(f(i) - to_double(exact(i))) <= 1e-12);
  }
}

TEST_CASE("example-4-3 constant c_n") {
  CHECK(example_4_3_c(1) == Rational(1, 2));
  CHECK(example_4_3_c(2) == Rational(3, 8));
  const double c = to_double(example_4_3_c(60));
  CHECK(c == doctest::Approx(0.288788095086602));
}

TEST_CASE("long horizons on shift-type instances are approximate") {
  CHECK_FALSE(make_instance("example-4-3", {.dim = 32, .horizon = 24}).semigroup.approximate());
  CHECK(make_instance("example-4-3", {.dim = 32, .horizon = 30}).semigroup.approximate());
  CHECK_THROWS_AS(build_example_4_3(4), InvalidArgument);
}

TEST_CASE("example-5-4 is an exact projection") {
  const MatQ t = example_5_4_matrix_exact(12);
  CHECK(MatQ(t * t) == t);
  const Semigroup s = build_example_5_4(12);
  for (Index k = 0; k < 12; ++k)
    CHECK(al_norm(s.space(), apply(s.step_operator(), unit<double>(12, k))) == std::ldexp(1.0, -static_cast<int>(k)));
}

TEST_CASE("example-6-6 envelope and native operator") {
  const Example66 ex = build_example_6_6(64, 2.0);
  CHECK(is_markov(ex.envelope.step_operator()));
  CHECK_FALSE(ex.native.space().is_al());
  CHECK(ex.native.space().p_exponent() == 2.0);
  for (Index j = 1; j < 6; ++j) {
    // Tail mass after n steps from e_j, against the ratio j / (j + n) at p = 2.
    VecD f = unit<double>(64, j);
    for (Index n = 1; n <= 10; ++n) {
      f = apply(ex.envelope.step_operator(), f);
      double tail = 0.0;
      for (Index i = 1; i < 64; ++i) tail += ex.envelope.space().weight(i) * f(i);
      const double ratio = static_cast<double>(j) / static_cast<double>(j + n);
      CHECK(tail / ex.envelope.space().weight(j) == doctest::Approx(ratio).epsilon(1e-12));
      CHECK(tail == doctest::Approx(example_6_6_tail_mass(j, n, 2.0)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(build_example_6_6(64, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_example_6_6(8, 2.0), InvalidArgument);
}

TEST_CASE("rotation semigroup is exempt and periodic") {
  const Semigroup rot = build_rotation_semigroup(2.0);
  CHECK(rot.step_operator().positivity_exempt());
  CHECK((materialize(evaluate(rot, 1.0)) + MatD::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((materialize(evaluate(rot, 2.0)) - MatD::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("registry") {
  for (const auto& entry : gallery_entries()) {
    const GalleryInstance inst = make_instance(entry.id, {.dim = entry.id == "example-6-6" ? Index{32} : Index{16}});
    CHECK(inst.id == entry.id);
    CHECK(inst.semigroup.space().dim() == inst.dim);
    CHECK(inst.horizon > 0);
  }
  CHECK_THROWS_AS(make_instance("no-such-instance"), InvalidArgument);
}

TEST_CASE("random generators") {
  std::mt19937_64 rng(3);
  const MatD t = random_primitive_stochastic(9, rng);
  CHECK((t.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK((t.array() >= 0.0).all());
  const MatD b = random_block_stochastic({2, 3}, rng);
  CHECK(b.block(0, 2, 2, 3).isZero(0.0));
  CHECK(b.block(2, 0, 3, 2).isZero(0.0));
  const MatD q = random_primitive_generator(5, rng);
  CHECK(q.colwise().sum().cwiseAbs().maxCoeff() < 1e-14);
  const VecD pi = perron_vector_oracle(t);
  CHECK((t * pi - pi).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(pi.sum() == doctest::Approx(1.0));
}
