#pragma once

#include "posg/operator.hpp"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace posg {

/// x -> slope * x + intercept on [lo, hi).
struct AffineBranch {
  double lo = 0.0;
  double hi = 1.0;
  double slope = 1.0;
  double intercept = 0.0;
};

/// Monotone branch given by a callable. `preimage_measure(lo, hi, c, d)`
/// returns the Lebesgue measure of {x in [lo, hi) : phi(x) in [c, d)}; without
/// it the branch cannot be discretized.
struct CallableBranch {
  double lo = 0.0;
  double hi = 1.0;
  std::function<double(double)> map;
  std::function<double(double, double, double, double)> preimage_measure;
};

using Branch = std::variant<AffineBranch, CallableBranch>;

/// Piecewise map of [0, 1) whose branch domains partition [0, 1).
class IntervalMap {
 public:
  explicit IntervalMap(std::vector<Branch> branches);

  static IntervalMap doubling();
  static IntervalMap tent();
  static IntervalMap identity();

  const std::vector<Branch>& branches() const { return branches_; }
  bool piecewise_affine() const;
  double operator()(double x) const;

 private:
  std::vector<Branch> branches_;
};

/// sigma: {0..N-1} -> {0..N-1} over a weighted space.
struct FiniteMap {
  std::vector<Index> sigma;
  WeightedSpace space;
};

/**
 * @brief Ulam matrix on the uniform partition into n_cells cells:
 * T_ij = m(phi^{-1}(A_i) cap A_j) / m(A_j), over cell weights 1/n_cells.
 *
 * Affine branches are intersected in exact rational arithmetic. The result is
 * flagged approximate unless every branch endpoint lies on the grid and every
 * cell is mapped onto a union of cells, in which case the Ulam operator is
 * the exact transfer operator on cell-constant densities. Throws
 * UnsupportedBranch for callable branches without a preimage measure.
 */
PositiveOperator ulam_matrix(const IntervalMap& map, Index n_cells);

/// Transport kernel with gains w_j / w_sigma(j).
PositiveOperator fp_of_finite_map(const FiniteMap& map);

/// The adjoint as an operator on dual densities; g -> g o sigma for transports.
PositiveOperator koopman(const PositiveOperator& op);

/// T 1 = 1 within tol.
bool is_measure_preserving(const PositiveOperator& op, double tol = 1e-12);

/**
 * @brief Normalized fixed density by power iteration.
 *
 * Starts from the ramp density proportional to (i + 1), not the uniform one:
 * the uniform density is fixed by every permutation, so starting there would
 * hide periodicity. Throws NonConvergence after max_iter steps.
 */
VecD invariant_density(const PositiveOperator& op, double tol = 1e-13, Index max_iter = 100000);

}  // namespace posg
