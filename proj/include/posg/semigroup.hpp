#pragma once

#include "posg/operator.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace posg {

/// (t, value) samples of a diagnostic quantity.
using Trace = std::vector<std::pair<double, double>>;

/**
 * @brief Discrete semigroup (T^n) or continuous semigroup exp(tQ).
 *
 * Continuous positive semigroups are evaluated by uniformization with
 * P = I + Q/lambda, which keeps every partial sum positive. exempt_continuous()
 * admits an arbitrary real generator (evaluated with the matrix exponential)
 * for the Banach-space consistency diagnostics only.
 *
 * Diagnostics sample the semigroup at t = k * sample_step(), k = 1, 2, ...;
 * the step is 1 in discrete mode.
 */
class Semigroup {
 public:
  enum class Mode { discrete, continuous };

  static Semigroup discrete(PositiveOperator generator,
                            std::optional<double> bound_hint = std::nullopt);
  /// Q needs nonnegative off-diagonals and weighted column sums <= 0.
  /// lambda defaults to max_j |Q_jj| (1 when Q = 0).
  static Semigroup continuous(WeightedSpace space, MatD rate_matrix,
                              std::optional<double> uniformization_rate = std::nullopt,
                              double sample_step = 0.5);
  static Semigroup exempt_continuous(WeightedSpace space, MatD generator, double sample_step = 0.5);

  Mode mode() const { return mode_; }
  const WeightedSpace& space() const { return step_->space(); }
  Index dim() const { return step_->dim(); }
  double sample_step() const { return sample_step_; }
  /// Generator in discrete mode; T_{sample_step} in continuous mode.
  const PositiveOperator& step_operator() const { return *step_; }
  const MatD& rate_matrix() const { return rate_matrix_; }
  double uniformization_rate() const { return rate_; }
  std::optional<double> bound_hint() const { return bound_hint_; }
  bool positivity_exempt() const { return step_->positivity_exempt(); }
  bool approximate() const { return step_->approximate(); }
  /// Markov semigroup: conservative Q in continuous mode, Markov generator in discrete mode.
  bool conservative(double tol = 1e-12) const;

  Semigroup with_bound_hint(double bound) const;

 private:
  Semigroup() = default;

  Mode mode_ = Mode::discrete;
  std::optional<PositiveOperator> step_;
  MatD rate_matrix_;
  double rate_ = 0.0;
  double sample_step_ = 1.0;
  std::optional<double> bound_hint_;
};

/// T_t. Discrete mode needs a positive integer t. Throws InvalidArgument for t <= 0.
PositiveOperator evaluate(const Semigroup& s, double t);

/// T_{t_k} f; discrete orbits are computed by repeated application.
std::vector<VecD> orbit(const Semigroup& s, const VecD& f, const std::vector<double>& times);

/// max_j ||M e_j|| / ||e_j|| in the native norm; the exact operator norm in AL mode.
double column_norm(const WeightedSpace& space, const MatD& matrix);

/// max_k ||T_{k step}|| over k = 1..horizon, an estimate of sup_t ||T_t||.
double sampled_bound(const Semigroup& s, Index horizon);

struct ConvergenceReport {
  enum class Mode { strong, operator_norm };

  bool converged = false;
  Mode mode = Mode::strong;
  /// Set iff converged.
  std::optional<MatD> limit;
  /// Last sampled state; the limit candidate.
  MatD terminal;
  Index horizon_used = 0;
  double step = 1.0;
  double tolerance = 0.0;
  /// Strong mode: max_j ||T_t e_j - T_{t-step} e_j|| / ||e_j||. Norm mode: ||T_t - P||.
  Trace residual_trace;
  /// Cauchy diameter of the last quarter of the horizon (strong) or
  /// max ||T_t - P|| over that window (operator norm).
  double tail_residual = 0.0;
  double projection_defect = 0.0;
  double commutation_defect = 0.0;
  Index rank = 0;
  double rank_threshold = 1e-8;
  /// Largest per-column escaped mass, relative to ||e_j||.
  double escaped_mass = 0.0;
  bool approximate = false;
};

/**
 * @brief Runs the basis orbits T_t e_j and declares strong convergence when
 * every orbit is Cauchy over the tail window and the terminal state is a
 * projection commuting with the semigroup, all within tol.
 *
 * In finite dimensions strong and uniform convergence coincide; the two
 * diagnostics differ only in which residual they report.
 */
ConvergenceReport detect_strong_convergence(const Semigroup& s, Index horizon = 200,
                                            double tol = 1e-9);

/**
 * @brief Tests ||T_t - P|| -> 0. P is the strong-convergence candidate
 * unless `reference` is given, which is useful when the limit is known in
 * closed form and the horizon is too short to reach it.
 */
ConvergenceReport operator_norm_convergence(const Semigroup& s, Index horizon = 200,
                                            double tol = 1e-9,
                                            const std::optional<MatD>& reference = std::nullopt);

/// Cauchy diagnostic for a single orbit in a chosen norm.
struct OrbitConvergence {
  bool converged = false;
  double tail_diameter = 0.0;
  VecD terminal;
  Trace distance_to_terminal;
  double escaped_mass = 0.0;
};

OrbitConvergence detect_orbit_convergence(const Semigroup& s, const VecD& f, Index horizon,
                                          double tol, const Norm& norm);

struct EmbeddedConsistencyReport {
  std::vector<double> steps;
  std::vector<ConvergenceReport> embedded;
  ConvergenceReport continuous;
  /// Every embedded semigroup converged and their limits agree pairwise within tol.
  bool embedded_limits_coincide = false;
  /// The embedded limits coincide and agree with the continuous limit.
  bool agrees_with_continuous = false;
  /// Some embedded limit has rank 1, so the full semigroup is predicted to converge.
  bool rank_one_shortcut = false;
  bool rank_one_prediction_verified = false;
  /// Some embedded semigroup converges while the full semigroup does not.
  bool discrepancy = false;
  double max_pairwise_distance = 0.0;
  double tolerance = 0.0;
};

std::vector<double> default_embedded_steps();

EmbeddedConsistencyReport embedded_discrete_consistency(const Semigroup& s,
                                                        std::vector<double> steps = {},
                                                        Index horizon = 200, double tol = 1e-9);

}  // namespace posg
