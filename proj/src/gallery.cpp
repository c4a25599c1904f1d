#include "posg/gallery.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

namespace posg {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error("gallery self-validation failed: " + what);
}

void require_dim(Index n, Index min, const char* who) {
  if (n < min) {
    throw InvalidArgument(std::string(who) + ": dimension must be >= " + std::to_string(min));
  }
}

Rational dyadic(Index k) {
  Rational x(1);
  for (Index i = 0; i < k; ++i) x /= 2;
  return x;
}

MatD to_double(const MatQ& m) {
  MatD out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = m(i, j).convert_to<double>();
  }
  return out;
}

Index log2_exact(Index n) {
  int k = 0;
  while ((Index{1} << k) < n) ++k;
  if ((Index{1} << k) != n) throw InvalidArgument("Ulam instances need a power-of-two cell count");
  return k;
}

Semigroup mark_approximate(const Semigroup& s) {
  return Semigroup::discrete(s.step_operator().with_approximate(true), s.bound_hint());
}

}  // namespace

Semigroup build_example_4_3(Index n) {
  require_dim(n, 8, "build_example_4_3");
  const WeightedSpace space = WeightedSpace::counting(n);
  VecD h(n);
  for (Index i = 0; i < n; ++i) h(i) = std::ldexp(1.0, -static_cast<int>(i));
  const auto op = PositiveOperator::sum(
      {PositiveOperator::rank_one(space, Functional{h}, unit<double>(n, 0)),
       PositiveOperator::compose({PositiveOperator::right_shift(space),
                                  PositiveOperator::diagonal(space, VecD(VecD::Ones(n) - h))})});

  require(is_markov(op, 1e-12), "example-4-3 is Markov up to escaped mass");
  require(materialize(op) == to_double(example_4_3_matrix_exact(n)),
          "example-4-3 float entries equal the dyadic entries");
  // (T^k f)_i = 0 for 1 <= i <= k.
  VecD f = VecD::Ones(n);
  for (Index k = 1; k <= 4; ++k) {
    f = apply(op, f);
    require(f.segment(1, k).isZero(0.0), "example-4-3 orbit vanishes on 1..k");
  }
  return Semigroup::discrete(op, 1.0);
}

MatQ example_4_3_matrix_exact(Index n) {
  require_dim(n, 2, "example_4_3_matrix_exact");
  MatQ m = MatQ::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const Rational h = dyadic(j);
    m(0, j) += h;
    if (j + 1 < n) m(j + 1, j) = Rational(1) - h;
  }
  return m;
}

Rational example_4_3_c(Index n) {
  Rational c(1);
  for (Index k = 1; k <= n; ++k) c *= Rational(1) - dyadic(k);
  return c;
}

Semigroup build_example_5_4(Index n) {
  require_dim(n, 8, "build_example_5_4");
  const WeightedSpace space = WeightedSpace::counting(n);
  VecD h(n);
  for (Index i = 0; i < n; ++i) h(i) = std::ldexp(1.0, -static_cast<int>(i));
  const auto op = PositiveOperator::rank_one(space, Functional{h}, unit<double>(n, 0));

  const MatD t = materialize(op);
  require(t * t == t, "example-5-4 is a projection");
  for (Index i = 0; i < n; ++i) {
    require(t.col(i).cwiseAbs().sum() == h(i), "example-5-4 column norms are 2^-i");
  }
  return Semigroup::discrete(op, 1.0);
}

MatQ example_5_4_matrix_exact(Index n) {
  require_dim(n, 2, "example_5_4_matrix_exact");
  MatQ m = MatQ::Zero(n, n);
  for (Index j = 0; j < n; ++j) m(0, j) = dyadic(j);
  return m;
}

Example66 build_example_6_6(Index n, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("build_example_6_6: p must be > 1");
  require_dim(n, 16, "build_example_6_6");
  VecD w(n);
  VecD c(n);
  VecD m(n);
  w(0) = 1.0;
  c(0) = 1.0;
  m(0) = 0.0;
  for (Index k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    w(k) = std::pow(kd, -p);
    // 1 - (k / (k + 1))^{p - 1}
    c(k) = -std::expm1((p - 1.0) * std::log1p(-1.0 / (kd + 1.0)));
    m(k) = (kd + 1.0) / kd;
  }
  const double boundary = std::pow(static_cast<double>(n), -p);
  auto build = [&](const WeightedSpace& space) {
    return PositiveOperator::sum(
        {PositiveOperator::rank_one(space, Functional{c}, unit<double>(n, 0)),
         PositiveOperator::compose({PositiveOperator::right_shift(space, boundary),
                                    PositiveOperator::diagonal(space, m)})});
  };
  const WeightedSpace native(w, p);
  const WeightedSpace envelope(w, 1.0);
  Example66 out{Semigroup::discrete(build(native)), Semigroup::discrete(build(envelope), 1.0),
                Functional::norm_functional(n), p};

  const PositiveOperator& t1 = out.envelope.step_operator();
  require(is_markov(t1, 1e-12), "example-6-6 envelope operator is Markov");
  // The truncated shift leaks from the last column; add it back as is_markov does.
  const VecD fixed = adjoint_apply(t1, out.psi).coefficients + column_leak(t1);
  require((fixed - out.psi.coefficients).cwiseAbs().maxCoeff() <= 1e-12,
          "example-6-6 psi is fixed by the adjoint");
  const VecD image = apply(out.native.step_operator(), unit<double>(n, 1));
  require(image(2) == 2.0 && image.tail(n - 3).isZero(0.0) && image(1) == 0.0,
          "example-6-6 shift band maps e_1 to 2 e_2");
  return out;
}

double example_6_6_tail_mass(Index j, Index n, double p) {
  return std::pow(static_cast<double>(j + n), 1.0 - p) / static_cast<double>(j);
}

Semigroup build_two_point_fp() {
  const auto op = fp_of_finite_map({{0, 0}, WeightedSpace::counting(2)});
  const MatD t = materialize(op);
  require(t == (MatD(2, 2) << 1, 1, 0, 0).finished(), "two-point operator is [[1, 1], [0, 0]]");
  require(t * t == t, "two-point operator is idempotent");
  require(!is_measure_preserving(op), "two-point operator is not measure preserving");
  return Semigroup::discrete(op, 2.0);
}

Semigroup build_rotation_semigroup(double t0) {
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw InvalidArgument("build_rotation_semigroup: t0 must be > 0");
  const double omega = 2.0 * std::numbers::pi / t0;
  MatD q(2, 2);
  q << 0.0, -omega, omega, 0.0;
  auto s = Semigroup::exempt_continuous(WeightedSpace::counting(2), q, 0.5);
  require(s.positivity_exempt(), "rotation semigroup is flagged positivity exempt");
  return s;
}

Semigroup build_collapse_map(Index n) {
  require_dim(n, 3, "build_collapse_map");
  std::vector<Index> sigma(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) sigma[static_cast<std::size_t>(j)] = std::max<Index>(j - 1, 1);
  const auto op = fp_of_finite_map({sigma, WeightedSpace::counting(n)});
  require(is_markov(op), "collapse map is Markov");
  require(adjoint_is_lattice_homomorphism(op), "collapse map has a lattice-homomorphic adjoint");
  return Semigroup::discrete(op, 1.0);
}

Semigroup build_cyclic_permutation(Index n) {
  require_dim(n, 2, "build_cyclic_permutation");
  std::vector<Index> sigma(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) sigma[static_cast<std::size_t>(j)] = (j + 1) % n;
  const auto op = fp_of_finite_map({sigma, WeightedSpace::counting(n)});
  require(is_measure_preserving(op), "cyclic permutation is measure preserving");
  require(is_lattice_homomorphism(op), "cyclic permutation is a lattice homomorphism");
  return Semigroup::discrete(op, 1.0);
}

Semigroup build_identity(Index n) {
  require_dim(n, 1, "build_identity");
  std::vector<Index> sigma(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) sigma[static_cast<std::size_t>(j)] = j;
  const auto op = fp_of_finite_map({sigma, WeightedSpace::counting(n)});
  require(materialize(op) == MatD::Identity(n, n), "identity map gives the identity operator");
  return Semigroup::discrete(op, 1.0);
}

Semigroup build_doubling_ulam(int k) {
  if (k < 1 || k > 14) throw InvalidArgument("build_doubling_ulam: k must be in 1..14");
  const Index n = Index{1} << k;
  const auto op = ulam_matrix(IntervalMap::doubling(), n);
  require(!op.approximate() && is_markov(op), "doubling Ulam matrix is exact and Markov");
  const MatD t = materialize(op);
  for (Index j = 0; j < n; ++j) {
    MatD expected_col = MatD::Zero(n, 1);
    expected_col((2 * j) % n, 0) = 0.5;
    expected_col((2 * j + 1) % n, 0) = 0.5;
    require(t.col(j) == expected_col, "doubling Ulam column has two entries 1/2");
  }
  return Semigroup::discrete(op, 1.0);
}

Semigroup build_tent_ulam(int k) {
  if (k < 1 || k > 14) throw InvalidArgument("build_tent_ulam: k must be in 1..14");
  const auto op = ulam_matrix(IntervalMap::tent(), Index{1} << k);
  require(!op.approximate() && is_markov(op), "tent Ulam matrix is exact and Markov");
  require(is_measure_preserving(op), "tent Ulam matrix preserves the uniform density");
  return Semigroup::discrete(op, 1.0);
}

MatD random_primitive_stochastic(Index n, std::mt19937_64& rng, double density) {
  require_dim(n, 1, "random_primitive_stochastic");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatD m = MatD::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (u(rng) < density) m(i, j) = u(rng);
    }
    m(j, j) += 0.1 + u(rng);
    m((j + 1) % n, j) += 0.1 + u(rng);
  }
  for (Index j = 0; j < n; ++j) m.col(j) /= m.col(j).sum();
  return m;
}

MatD random_block_stochastic(const std::vector<Index>& block_sizes, std::mt19937_64& rng) {
  Index n = 0;
  for (Index b : block_sizes) n += b;
  MatD m = MatD::Zero(n, n);
  Index offset = 0;
  for (Index b : block_sizes) {
    m.block(offset, offset, b, b) = random_primitive_stochastic(b, rng);
    offset += b;
  }
  return m;
}

MatD random_primitive_generator(Index n, std::mt19937_64& rng) {
  require_dim(n, 2, "random_primitive_generator");
  std::uniform_real_distribution<double> u(0.1, 1.1);
  MatD q(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) q(i, j) = i == j ? 0.0 : u(rng);
    q(j, j) = -q.col(j).sum();
  }
  return q;
}

VecD perron_vector_oracle(const MatD& stochastic) {
  Eigen::EigenSolver<MatD> solver(stochastic);
  const auto& values = solver.eigenvalues();
  Index best = 0;
  for (Index i = 1; i < values.size(); ++i) {
    if (std::abs(values(i) - 1.0) < std::abs(values(best) - 1.0)) best = i;
  }
  VecD v = solver.eigenvectors().col(best).real();
  if (v.sum() < 0.0) v = -v;
  return v / v.sum();
}

MatD rank_one_limit(const VecD& f0, const WeightedSpace& space) {
  return f0 * space.weights().transpose();
}

const std::vector<GalleryEntry>& gallery_entries() {
  static const std::vector<GalleryEntry> entries = {
      {"example-4-3", "Markov operator with individual lower bounds that does not converge"},
      {"example-5-4", "rank-one projection h (x) e_0 with ||P e_k|| = 2^-k"},
      {"example-6-6", "l^p operator with psi-lower bounds, convergent only in the l1 envelope"},
      {"two-point", "Frobenius-Perron operator of phi = 1 on two points"},
      {"rotation", "non-positive rotation semigroup of period t0"},
      {"collapse", "Frobenius-Perron operator of sigma(j) = max(j - 1, 1)"},
      {"cyclic", "cyclic permutation"},
      {"identity", "identity map"},
      {"doubling-ulam", "Ulam matrix of the doubling map"},
      {"tent-ulam", "Ulam matrix of the tent map"},
      {"primitive", "random primitive column-stochastic matrix"},
      {"block-diagonal", "block-diagonal stochastic matrix with three primitive blocks"},
      {"generator", "uniformized primitive rate matrix"},
  };
  return entries;
}

GalleryInstance make_instance(const std::string& id, const GalleryOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("tolerance must be > 0");
  if (options.horizon && *options.horizon < 1) throw InvalidArgument("horizon must be >= 1");
  std::mt19937_64 rng(options.seed);
  auto dim_or = [&](Index fallback) { return options.dim.value_or(fallback); };
  auto horizon_or = [&](Index fallback) { return options.horizon.value_or(fallback); };

  std::string description;
  for (const auto& e : gallery_entries()) {
    if (e.id == id) description = e.description;
  }
  if (description.empty()) throw InvalidArgument("unknown gallery instance '" + id + "'");

  auto finish = [&](Semigroup s, Index dim, Index horizon) {
    GalleryInstance inst{id, description, std::move(s)};
    inst.dim = dim;
    inst.horizon = horizon;
    return inst;
  };

  if (id == "example-4-3") {
    const Index n = dim_or(64);
    auto inst = finish(build_example_4_3(n), n, horizon_or(40));
    inst.shift_type = true;
    inst.exact_matrix = example_4_3_matrix_exact(n);
    if (inst.horizon > n - 8) inst.semigroup = mark_approximate(inst.semigroup);
    return inst;
  }
  if (id == "example-5-4") {
    const Index n = dim_or(32);
    auto inst = finish(build_example_5_4(n), n, horizon_or(200));
    inst.exact_matrix = example_5_4_matrix_exact(n);
    inst.reference_limit = materialize(inst.semigroup.step_operator());
    return inst;
  }
  if (id == "example-6-6") {
    const Index n = dim_or(400);
    auto ex = build_example_6_6(n, options.p);
    auto inst = finish(ex.native, n, horizon_or(300));
    inst.shift_type = true;
    inst.envelope = ex.envelope;
    inst.psi = ex.psi;
    if (inst.horizon > n - 8) {
      inst.semigroup = mark_approximate(inst.semigroup);
      inst.envelope = mark_approximate(*inst.envelope);
    }
    return inst;
  }
  if (id == "two-point") {
    auto inst = finish(build_two_point_fp(), 2, horizon_or(200));
    inst.fp_type = true;
    return inst;
  }
  if (id == "rotation") return finish(build_rotation_semigroup(options.t0), 2, horizon_or(200));
  if (id == "collapse") {
    const Index n = dim_or(100);
    auto inst = finish(build_collapse_map(n), n, horizon_or(std::max<Index>(200, 2 * n)));
    inst.fp_type = true;
    return inst;
  }
  if (id == "cyclic" || id == "identity") {
    const Index n = dim_or(id == "cyclic" ? 3 : 8);
    auto inst = finish(id == "cyclic" ? build_cyclic_permutation(n) : build_identity(n), n,
                       horizon_or(200));
    inst.fp_type = true;
    return inst;
  }
  if (id == "doubling-ulam" || id == "tent-ulam") {
    const Index n = dim_or(256);
    const int k = static_cast<int>(log2_exact(n));
    // The finite Ulam matrix equals its limit from n = k on, so the
    // norm-convergence run stops one step earlier.
    auto inst = finish(id == "doubling-ulam" ? build_doubling_ulam(k) : build_tent_ulam(k), n,
                       horizon_or(std::max(1, k - 1)));
    inst.fp_type = true;
    inst.reference_limit = rank_one_limit(VecD::Ones(n), inst.semigroup.space());
    return inst;
  }
  if (id == "primitive") {
    const Index n = dim_or(8);
    return finish(Semigroup::discrete(PositiveOperator::dense(WeightedSpace::counting(n),
                                                              random_primitive_stochastic(n, rng)),
                                      1.0),
                  n, horizon_or(200));
  }
  if (id == "block-diagonal") {
    const Index n = dim_or(12);
    require_dim(n, 6, "block-diagonal");
    const std::vector<Index> sizes = {n / 3, n / 3, n - 2 * (n / 3)};
    return finish(Semigroup::discrete(PositiveOperator::dense(WeightedSpace::counting(n),
                                                              random_block_stochastic(sizes, rng)),
                                      1.0),
                  n, horizon_or(200));
  }
  // generator
  const Index n = dim_or(4);
  return finish(Semigroup::continuous(WeightedSpace::counting(n), random_primitive_generator(n, rng)),
                n, horizon_or(200));
}

}  // namespace posg
