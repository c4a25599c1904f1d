#pragma once

#include "posg/lattice.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace posg {

class PositiveOperator;

using SparseD = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<double>;

struct DenseKernel {
  MatD matrix;
};

struct SparseKernel {
  SparseD matrix;
};

/// (phi (x) f) g = <phi, g> f.
struct RankOneKernel {
  Functional functional;
  VecD vector;
};

/// (S f)_i = f_{i-1}, (S f)_0 = 0. The last coordinate is pushed past the
/// truncation boundary into a phantom coordinate of weight `boundary_weight`.
struct ShiftKernel {
  double boundary_weight;
};

struct DiagonalKernel {
  VecD multiplier;
};

/// (T f)_i = sum_{j : sigma(j) = i} gains_j f_j. One structural entry per column.
struct TransportKernel {
  std::vector<Index> sigma;
  VecD gains;
};

struct SumKernel {
  std::vector<PositiveOperator> terms;
};

/// factors[0] o factors[1] o ... ; the last factor acts first.
struct ComposeKernel {
  std::vector<PositiveOperator> factors;
};

using Kernel = std::variant<DenseKernel, SparseKernel, RankOneKernel, ShiftKernel, DiagonalKernel,
                            TransportKernel, SumKernel, ComposeKernel>;

/// Image of a vector together with the AL-mass pushed past the truncation boundary.
struct TrackedImage {
  VecD image;
  double escaped = 0.0;
};

/// Maximum number of coordinates for which dense materialization is allowed
/// without an explicit override.
inline constexpr Index kDenseMaterializationCap = 4096;

/**
 * @brief Structured nonnegative linear map on a WeightedSpace.
 *
 * Immutable once built; copies share the kernel tree. All factories validate
 * nonnegativity of the structural entries, except exempt_dense(), which
 * admits non-positive matrices for the Banach-space consistency diagnostics
 * and marks the result positivity_exempt().
 */
class PositiveOperator {
 public:
  static PositiveOperator dense(WeightedSpace space, MatD matrix);
  static PositiveOperator sparse(WeightedSpace space, const std::vector<Triplet>& triplets);
  static PositiveOperator sparse(WeightedSpace space, SparseD matrix);
  static PositiveOperator rank_one(WeightedSpace space, Functional functional, VecD vector);
  /// Boundary weight defaults to the weight of the last coordinate.
  static PositiveOperator right_shift(WeightedSpace space,
                                      std::optional<double> boundary_weight = std::nullopt);
  static PositiveOperator diagonal(WeightedSpace space, VecD multiplier);
  static PositiveOperator transport(WeightedSpace space, std::vector<Index> sigma, VecD gains);
  static PositiveOperator identity(WeightedSpace space);
  static PositiveOperator sum(std::vector<PositiveOperator> terms);
  static PositiveOperator compose(std::vector<PositiveOperator> factors);
  static PositiveOperator exempt_dense(WeightedSpace space, MatD matrix);

  const WeightedSpace& space() const { return node_->space; }
  Index dim() const { return node_->space.dim(); }
  const Kernel& kernel() const { return node_->kernel; }
  const char* kind_name() const;

  /// True when the operator came out of an uncontrolled discretization.
  bool approximate() const { return node_->approximate; }
  bool positivity_exempt() const { return node_->exempt; }
  PositiveOperator with_approximate(bool flag) const;

 private:
  struct Node {
    WeightedSpace space;
    Kernel kernel;
    bool approximate = false;
    bool exempt = false;
  };
  explicit PositiveOperator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static PositiveOperator make(WeightedSpace space, Kernel kernel, bool approximate = false,
                               bool exempt = false);

  std::shared_ptr<const Node> node_;
};

VecD apply(const PositiveOperator& op, const VecD& f);
TrackedImage apply_tracked(const PositiveOperator& op, const VecD& f);

/// Column-wise application to a batch of vectors.
MatD apply(const PositiveOperator& op, const MatD& columns);

/// Same as the batch apply, also returning per-column escaped mass.
MatD apply_tracked(const PositiveOperator& op, const MatD& columns, VecD& escaped);

/// Adjoint on dual densities: <T' phi, f> = <phi, T f>.
Functional adjoint_apply(const PositiveOperator& op, const Functional& phi);

/// Dense matrix of the operator. Throws InvalidArgument beyond `cap`.
MatD materialize(const PositiveOperator& op, Index cap = kDenseMaterializationCap);

/// Exact weighted l^1 operator norm: max_j sum_i w_i |T_ij| / w_j.
double weighted_operator_norm(const PositiveOperator& op);
double weighted_operator_norm(const WeightedSpace& space, const MatD& matrix);

/// Per-column escaped AL-mass of T e_j, divided by w_j.
VecD column_leak(const PositiveOperator& op);

/// sup_j |(T' 1)_j + leak_j - 1|; zero for Markov operators.
double markov_defect(const PositiveOperator& op);

/// Positive, AL mode, and |T' 1 - 1|_inf <= tol once truncation leak is added back.
bool is_markov(const PositiveOperator& op, double tol = 1e-12);

/// Structural sparsity pattern, one sorted row list per column.
struct Pattern {
  Index rows = 0;
  std::vector<std::vector<Index>> columns;

  std::size_t max_per_column() const;
  std::size_t max_per_row() const;
};

Pattern structural_pattern(const PositiveOperator& op);

/// At most one structural entry per row, so |T f| = T |f|.
bool is_lattice_homomorphism(const PositiveOperator& op);

/// At most one structural entry per column, so T' is a lattice homomorphism.
bool adjoint_is_lattice_homomorphism(const PositiveOperator& op);

/**
 * @brief For T with a lattice-homomorphism adjoint, returns x in [f, g] with
 * T x = y, given T f <= y <= T g.
 *
 * Slack y_i - (T f)_i is spread greedily over the preimage group of i in
 * column order, each coordinate moving at most g_j - f_j. Throws
 * InfeasibleTarget when y is outside [T f, T g] or f > g somewhere, and
 * StructuralGateError when some column carries more than one entry.
 */
VecD interval_preservation_witness(const PositiveOperator& op, const VecD& f, const VecD& g,
                                   const VecD& y, double tol = 1e-12);

}  // namespace posg
