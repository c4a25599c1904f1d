#pragma once

#include "posg/semigroup.hpp"

#include <string>
#include <vector>

namespace posg {

enum class HypothesisStatus { holds, fails, unknown };

/// A certifier never reports `violated` for a theorem whose hypothesis did
/// not hold; truncation artifacts downgrade `violated` to `inconclusive`.
enum class ConclusionStatus { verified, violated, inconclusive, not_applicable };

const char* to_string(HypothesisStatus status);
const char* to_string(ConclusionStatus status);

struct HypothesisCheck {
  std::string name;
  HypothesisStatus status = HypothesisStatus::unknown;
  /// The measured quantity (a constant M, a norm, a defect); NaN if none.
  double value = 0.0;
  std::string detail;
};

struct LowerBoundReport {
  enum class Kind { uniform, individual, maximal, psi_weighted };

  Kind kind = Kind::uniform;
  VecD bound;
  double norm_of_bound = 0.0;
  /// (t, deficiency); the sup over vertices for uniform checks.
  Trace deficiency_trace;
  bool certified = false;
  std::vector<HypothesisCheck> hypothesis_log;
  Index horizon = 0;
  double tolerance = 0.0;
  double shrink_factor = 1.0;
  /// Individual estimates: the candidate failed validation and was replaced by 0.
  bool fell_back_to_zero = false;
  /// Maximal estimates: T_step h = h within tol.
  bool fixed_point = false;
  Index rounds = 0;
  double escaped_mass = 0.0;
  bool approximate = false;
};

const char* to_string(LowerBoundReport::Kind kind);

struct CertifierReport {
  std::string theorem;
  std::vector<HypothesisCheck> hypotheses;
  HypothesisStatus hypothesis = HypothesisStatus::unknown;
  ConclusionStatus conclusion = ConclusionStatus::not_applicable;
  /// Second direction of two-sided theorems; not_applicable otherwise.
  ConclusionStatus converse = ConclusionStatus::not_applicable;
  std::optional<ConvergenceReport> convergence;
  std::optional<LowerBoundReport> bound_report;
  /// Norms of the per-vertex individual bounds, in vertex order.
  VecD vertex_bound_norms;
  std::optional<MatD> predicted_limit;
  std::optional<VecD> fixed_vector;
  std::optional<VecD> limit_functional;
  double epsilon = 0.0;
  double positivity_floor = 1e-12;
  /// min_j ||P e_j|| / ||e_j|| of the detected limit.
  double limit_floor = 0.0;
  Index horizon = 0;
  double tolerance = 0.0;
  bool approximate = false;
  std::vector<std::string> notes;
};

/// Combines a list of checks: fails if any fails, holds if all hold.
HypothesisStatus combine(const std::vector<HypothesisCheck>& checks);

/// e_j / ||e_j||_selector as the columns of a diagonal matrix.
MatD normalized_vertices(const WeightedSpace& space, const Norm& selector = Norm::al());

/**
 * @brief sup over normalized f >= 0 of ||(T_t f - h)^-|| at every sampled t.
 *
 * f -> ||(A f - h)^-|| is convex for linear A, and in AL mode (or in the
 * psi-norm) the normalized positive vectors form a simplex whose vertices
 * are e_j / ||e_j||. A convex function on a simplex attains its sup at a
 * vertex, so iterating the basis orbits is exact. Certified when the
 * deficiency stays below tol over the last quarter of the horizon. In finite
 * dimensions the strong and uniform variants compute the same quantity.
 */
LowerBoundReport uniform_lower_bound_check(const Semigroup& s, const VecD& h, Index horizon = 200,
                                           double tol = 1e-9,
                                           const Norm& selector = Norm::al());

/**
 * @brief Tail infimum of the orbit over the second half of the horizon,
 * scaled by shrink, then re-validated over a further half horizon.
 *
 * A candidate that fails validation is replaced by the zero bound, which is
 * always valid.
 */
LowerBoundReport individual_lower_bound_estimate(const Semigroup& s, const VecD& f,
                                                 Index horizon = 200, double shrink_factor = 0.95,
                                                 double tol = 1e-9,
                                                 const Norm& selector = Norm::al());

/// h <- h v (tail infimum of the orbit of h) until the norm gain per round is <= tol.
LowerBoundReport maximal_lower_bound_estimate(const Semigroup& s, const VecD& f,
                                              Index horizon = 200, double tol = 1e-9);

/**
 * @brief Uniform lower bound h != 0 implies strong convergence to a rank-1
 * projection phi (x) f0. Throws PreconditionNotCertified if h is not a
 * certified non-zero lower bound.
 */
CertifierReport lasota_yorke_certify(const Semigroup& s, const VecD& h, Index horizon = 200,
                                     double tol = 1e-9);

/// Vertex bounds with inf norm >= eps if and only if convergence with ||P e_j|| >= eps ||e_j||.
CertifierReport individual_bounds_certify(const Semigroup& s, double epsilon, Index horizon = 200,
                                          double tol = 1e-9);

/// Asymptotic domination of a convergent semigroup with ||P f|| >= eps ||f|| transfers convergence.
CertifierReport domination_transfer(const Semigroup& dominating, const Semigroup& dominated,
                                    Index horizon = 200, double tol = 1e-9);

/// Lattice-homomorphic adjoint plus non-zero vertex bounds implies convergence with P f > 0.
/// Throws StructuralGateError when the adjoint gate is closed.
CertifierReport ding_certify(const Semigroup& s, Index horizon = 200, double tol = 1e-9,
                             double positivity_floor = 1e-12);

/// For lattice homomorphisms: non-zero vertex bounds, identity, and a
/// strictly positive limit must agree. Throws StructuralGateError.
CertifierReport lattice_homo_rigidity(const Semigroup& s, Index horizon = 200, double tol = 1e-9,
                                      double positivity_floor = 1e-12);

/**
 * @brief Lower bounds measured by a strictly positive functional psi.
 *
 * Checks T_t f0 <= M f0 and T_t' psi <= M psi on the sampled horizon. A
 * constant that keeps growing over the horizon is reported as infeasible.
 * Vertices are normalized by <psi, e_j> = 1.
 */
CertifierReport psi_lower_bound_certify(const Semigroup& s, const VecD& h, const Functional& psi,
                                        const VecD& f0, Index horizon = 200, double tol = 1e-9);

}  // namespace posg
