#pragma once

#include "posg/frobenius_perron.hpp"
#include "posg/semigroup.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace posg {

// Named example operators. Every builder checks the properties its example
// is known for before returning and throws Error if one does not hold.

/// Tf = <h, f> e_0 + S M f on l1(N_0) truncated to N states, h_i = 2^-i, M = diag(1 - h).
Semigroup build_example_4_3(Index n);
/// The same matrix with exact dyadic entries.
MatQ example_4_3_matrix_exact(Index n);
/// c_n = prod_{k=1}^n (1 - 2^-k).
Rational example_4_3_c(Index n);

/// T = h (x) e_0 with h_i = 2^-i: a projection with ||T e_i|| = 2^-i.
Semigroup build_example_5_4(Index n);
MatQ example_5_4_matrix_exact(Index n);

/// The operator of example-6-6 on weights mu_0 = 1, mu_k = k^-p, in the native
/// l^p norm and on the l1 envelope with the same weights.
struct Example66 {
  Semigroup native;
  Semigroup envelope;
  /// Norm functional of the envelope, restricted to l^p.
  Functional psi;
  double p = 2.0;
};

Example66 build_example_6_6(Index n, double p);
/// Closed form of ||(T^n e_j)|_{>=1}||_1 = mu_j (j / (j + n))^{p-1} = (j + n)^{1-p} / j
/// on the envelope.
double example_6_6_tail_mass(Index j, Index n, double p);

/// phi = 1 on {0, 1} with counting weights: T = [[1, 1], [0, 0]].
Semigroup build_two_point_fp();
/// Non-positive rotation generator with period t0.
Semigroup build_rotation_semigroup(double t0);

// Suite instances.

/// sigma(j) = max(j - 1, 1) on counting weights.
Semigroup build_collapse_map(Index n);
Semigroup build_cyclic_permutation(Index n);
Semigroup build_identity(Index n);
/// Ulam matrix of the doubling or tent map on 2^k cells.
Semigroup build_doubling_ulam(int k);
Semigroup build_tent_ulam(int k);

/// Column-stochastic matrix with a positive diagonal and a Hamiltonian cycle,
/// hence primitive; other entries are present with probability `density`.
MatD random_primitive_stochastic(Index n, std::mt19937_64& rng, double density = 0.6);
/// Block-diagonal stochastic matrix with primitive blocks of the given sizes.
MatD random_block_stochastic(const std::vector<Index>& block_sizes, std::mt19937_64& rng);
/// Conservative rate matrix with positive off-diagonals.
MatD random_primitive_generator(Index n, std::mt19937_64& rng);

/// Perron eigenvector of a column-stochastic matrix, AL-normalized, by
/// dense eigendecomposition. Independent of the power-iteration code paths.
VecD perron_vector_oracle(const MatD& stochastic);

/// Limit of the uniform-limit-rank-1 instances: P = f0 (x) 1.
MatD rank_one_limit(const VecD& f0, const WeightedSpace& space);

struct GalleryOptions {
  std::optional<Index> dim;
  std::optional<Index> horizon;
  double tol = 1e-9;
  double p = 2.0;
  double t0 = 1.0;
  std::uint64_t seed = 20240607;
};

struct GalleryInstance {
  std::string id;
  std::string description;
  Semigroup semigroup;
  Index dim = 0;
  Index horizon = 0;
  /// Truncated shift operator: the closed-form orbit holds for horizon <= dim - 8.
  bool shift_type = false;
  /// Frobenius-Perron operator of a map (transport or Ulam).
  bool fp_type = false;
  /// Known limit used as the norm-convergence reference.
  std::optional<MatD> reference_limit{};
  std::optional<Semigroup> envelope{};
  std::optional<Functional> psi{};
  /// Exact matrix for the dyadic examples.
  std::optional<MatQ> exact_matrix{};
};

struct GalleryEntry {
  std::string id;
  std::string description;
};

const std::vector<GalleryEntry>& gallery_entries();

/**
 * @brief Builds a registered instance with defaults filled in. For shift-type
 * instances a horizon above dim - 8 marks the semigroup approximate.
 * Throws InvalidArgument for unknown ids or invalid sizes.
 */
GalleryInstance make_instance(const std::string& id, const GalleryOptions& options = {});

}  // namespace posg
