#include "posg/semigroup.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

namespace posg {

namespace {

constexpr double kPoissonTail = 1e-14;
// Poisson mean per uniformization chunk; keeps e^{-x} far from underflow.
constexpr double kMaxChunkMean = 50.0;
// Exact pairwise window diameters up to this many coordinate comparisons.
constexpr double kPairwiseBudget = 4e7;

MatD matrix_power(MatD base, long exponent) {
  MatD result = MatD::Identity(base.rows(), base.cols());
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

// e^{-x} sum_k x^k / k! P^k, truncated once the remaining Poisson mass is below kPoissonTail.
MatD poisson_series(const MatD& p, double x) {
  const Index n = p.rows();
  double weight = std::exp(-x);
  double cumulative = weight;
  MatD power = MatD::Identity(n, n);
  MatD sum = weight * power;
  const int k_max = static_cast<int>(std::ceil(x + 15.0 * std::sqrt(x) + 40.0));
  for (int k = 1; k <= k_max && 1.0 - cumulative > kPoissonTail; ++k) {
    power = p * power;
    weight *= x / k;
    cumulative += weight;
    sum += weight * power;
  }
  return sum;
}

MatD uniformize(const MatD& q, double rate, double t) {
  const Index n = q.rows();
  if (rate == 0.0) return MatD::Identity(n, n);
  const MatD p = MatD::Identity(n, n) + q / rate;
  const long chunks = std::max(1L, static_cast<long>(std::ceil(rate * t / kMaxChunkMean)));
  const MatD chunk = poisson_series(p, rate * t / static_cast<double>(chunks));
  // Round-off can leave entries of order -1e-17 in the series; clamp to the cone.
  return matrix_power(chunk, chunks).cwiseMax(0.0);
}

long integer_time(double t) {
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-9) {
    throw InvalidArgument("evaluate: discrete semigroups need integer times, got " +
                          std::to_string(t));
  }
  return static_cast<long>(r);
}

VecD column_norms(const WeightedSpace& space, const MatD& m) {
  if (space.is_al()) return m.cwiseAbs().transpose() * space.weights();
  VecD out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) out(j) = p_norm(space, m.col(j));
  return out;
}

VecD unit_norms(const WeightedSpace& space) {
  return space.weights().array().pow(1.0 / space.p_exponent()).matrix();
}

double window_diameter(const WeightedSpace& space, const std::vector<MatD>& window,
                       const VecD& scale) {
  if (window.size() < 2) return 0.0;
  const double n = static_cast<double>(window.front().size());
  const double w = static_cast<double>(window.size());
  double diameter = 0.0;
  if (w * w * n / 2.0 <= kPairwiseBudget) {
    for (std::size_t a = 0; a < window.size(); ++a) {
      for (std::size_t b = a + 1; b < window.size(); ++b) {
        const VecD d = column_norms(space, window[a] - window[b]).cwiseQuotient(scale);
        diameter = std::max(diameter, d.maxCoeff());
      }
    }
    return diameter;
  }
  // Too many pairs: twice the radius around the terminal state bounds the diameter.
  for (std::size_t a = 0; a + 1 < window.size(); ++a) {
    const VecD d = column_norms(space, window[a] - window.back()).cwiseQuotient(scale);
    diameter = std::max(diameter, d.maxCoeff());
  }
  return 2.0 * diameter;
}

Index estimate_rank(const MatD& m, double threshold) {
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0;
  Eigen::ColPivHouseholderQR<MatD> qr(m);
  qr.setThreshold(threshold);
  return qr.rank();
}

// Projection and commutation defects of a limit candidate, sampled at 1..4 steps.
void fill_limit_defects(const Semigroup& s, const MatD& p, ConvergenceReport& report) {
  const WeightedSpace& space = s.space();
  report.projection_defect = column_norm(space, p * p - p);
  MatD moved = p;
  report.commutation_defect = 0.0;
  for (int k = 0; k < 4; ++k) {
    moved = apply(s.step_operator(), moved);
    report.commutation_defect = std::max(report.commutation_defect, column_norm(space, moved - p));
  }
  report.rank = estimate_rank(p, report.rank_threshold);
}

Index tail_window(Index horizon) { return std::max<Index>(1, horizon / 4); }

}  // namespace

Semigroup Semigroup::discrete(PositiveOperator generator, std::optional<double> bound_hint) {
  Semigroup s;
  s.mode_ = Mode::discrete;
  s.step_ = std::move(generator);
  s.sample_step_ = 1.0;
  s.bound_hint_ = bound_hint;
  return s;
}

Semigroup Semigroup::continuous(WeightedSpace space, MatD rate_matrix,
                                std::optional<double> uniformization_rate, double sample_step) {
  const Index n = space.dim();
  require_same_dim(n, rate_matrix.rows(), "continuous semigroup");
  require_same_dim(n, rate_matrix.cols(), "continuous semigroup");
  if (!rate_matrix.allFinite()) throw InvalidArgument("continuous semigroup: non-finite rate");
  if (!(sample_step > 0.0)) throw InvalidArgument("continuous semigroup: sample step must be > 0");
  double max_diag = 0.0;
  const double scale = 1.0 + rate_matrix.cwiseAbs().maxCoeff();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i != j && rate_matrix(i, j) < 0.0) {
        throw InvalidArgument("continuous semigroup: negative off-diagonal rate");
      }
    }
    max_diag = std::max(max_diag, std::abs(rate_matrix(j, j)));
    const double column = compensated_sum(space.weights().cwiseProduct(rate_matrix.col(j)));
    if (column > 1e-12 * scale * space.weight(j)) {
      throw InvalidArgument("continuous semigroup: weighted column sum of Q is positive");
    }
  }
  const double rate = uniformization_rate.value_or(max_diag == 0.0 ? 1.0 : max_diag);
  if (!(rate >= max_diag) || !std::isfinite(rate) || rate <= 0.0) {
    throw InvalidArgument("continuous semigroup: uniformization rate below max |Q_jj|");
  }
  Semigroup s;
  s.mode_ = Mode::continuous;
  s.rate_matrix_ = std::move(rate_matrix);
  s.rate_ = rate;
  s.sample_step_ = sample_step;
  s.step_ = PositiveOperator::dense(space, uniformize(s.rate_matrix_, rate, sample_step));
  return s;
}

Semigroup Semigroup::exempt_continuous(WeightedSpace space, MatD generator, double sample_step) {
  require_same_dim(space.dim(), generator.rows(), "exempt semigroup");
  require_same_dim(space.dim(), generator.cols(), "exempt semigroup");
  if (!(sample_step > 0.0)) throw InvalidArgument("exempt semigroup: sample step must be > 0");
  Semigroup s;
  s.mode_ = Mode::continuous;
  s.rate_matrix_ = std::move(generator);
  s.sample_step_ = sample_step;
  const MatD step = (s.rate_matrix_ * sample_step).exp();
  s.step_ = PositiveOperator::exempt_dense(std::move(space), step);
  return s;
}

bool Semigroup::conservative(double tol) const {
  if (mode_ == Mode::discrete) return is_markov(*step_, tol);
  if (positivity_exempt() || !space().is_al()) return false;
  const double scale = 1.0 + rate_matrix_.cwiseAbs().maxCoeff();
  for (Index j = 0; j < dim(); ++j) {
    const double column = compensated_sum(space().weights().cwiseProduct(rate_matrix_.col(j)));
    if (std::abs(column) > tol * scale * space().weight(j)) return false;
  }
  return true;
}

Semigroup Semigroup::with_bound_hint(double bound) const {
  Semigroup s = *this;
  s.bound_hint_ = bound;
  return s;
}

PositiveOperator evaluate(const Semigroup& s, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidArgument("evaluate: t must be a positive finite time");
  }
  const PositiveOperator& step = s.step_operator();
  if (s.mode() == Semigroup::Mode::discrete) {
    const long n = integer_time(t);
    if (n == 1) return step;
    MatD power = matrix_power(materialize(step), n);
    if (step.positivity_exempt()) return PositiveOperator::exempt_dense(step.space(), power);
    return PositiveOperator::dense(step.space(), power.cwiseMax(0.0)).with_approximate(step.approximate());
  }
  if (s.positivity_exempt()) {
    return PositiveOperator::exempt_dense(step.space(), (s.rate_matrix() * t).exp());
  }
  return PositiveOperator::dense(step.space(), uniformize(s.rate_matrix(), s.uniformization_rate(), t));
}

std::vector<VecD> orbit(const Semigroup& s, const VecD& f, const std::vector<double>& times) {
  s.space().check(f.size(), "orbit");
  std::vector<VecD> states;
  states.reserve(times.size());
  VecD current = f;
  double now = 0.0;
  std::optional<std::pair<double, PositiveOperator>> cached;
  for (double t : times) {
    if (t < now) throw InvalidArgument("orbit: times must be nondecreasing and nonnegative");
    if (s.mode() == Semigroup::Mode::discrete) {
      const long steps = integer_time(t) - integer_time(now);
      for (long k = 0; k < steps; ++k) current = apply(s.step_operator(), current);
    } else if (t > now) {
      const double dt = t - now;
      if (!cached || cached->first != dt) cached.emplace(dt, evaluate(s, dt));
      current = apply(cached->second, current);
    }
    now = t;
    states.push_back(current);
  }
  return states;
}

double column_norm(const WeightedSpace& space, const MatD& matrix) {
  require_same_dim(space.dim(), matrix.rows(), "column_norm");
  if (matrix.cols() == 0) return 0.0;
  return column_norms(space, matrix).cwiseQuotient(unit_norms(space)).maxCoeff();
}

double sampled_bound(const Semigroup& s, Index horizon) {
  MatD x = MatD::Identity(s.dim(), s.dim());
  double bound = 0.0;
  for (Index k = 0; k < horizon; ++k) {
    x = apply(s.step_operator(), x);
    bound = std::max(bound, column_norm(s.space(), x));
  }
  return bound;
}

ConvergenceReport detect_strong_convergence(const Semigroup& s, Index horizon, double tol) {
  if (horizon < 2) throw InvalidArgument("detect_strong_convergence: horizon must be >= 2");
  const WeightedSpace& space = s.space();
  const Index n = s.dim();
  const VecD scale = unit_norms(space);
  const Index first_tail = horizon - tail_window(horizon);

  ConvergenceReport report;
  report.mode = ConvergenceReport::Mode::strong;
  report.horizon_used = horizon;
  report.step = s.sample_step();
  report.tolerance = tol;

  MatD x = MatD::Identity(n, n);
  VecD escaped_total = VecD::Zero(n);
  std::vector<MatD> window;
  for (Index k = 1; k <= horizon; ++k) {
    VecD escaped;
    MatD next = apply_tracked(s.step_operator(), x, escaped);
    escaped_total += escaped;
    const double residual = column_norms(space, next - x).cwiseQuotient(scale).maxCoeff();
    report.residual_trace.emplace_back(static_cast<double>(k) * s.sample_step(), residual);
    x = std::move(next);
    if (k >= first_tail) window.push_back(x);
  }
  report.tail_residual = window_diameter(space, window, scale);
  report.terminal = x;
  fill_limit_defects(s, x, report);
  report.escaped_mass = escaped_total.cwiseQuotient(space.weights()).maxCoeff();
  report.approximate = s.approximate() || report.escaped_mass > tol;
  report.converged = report.tail_residual <= tol && report.projection_defect <= tol &&
                     report.commutation_defect <= tol;
  if (report.converged) report.limit = x;
  return report;
}

ConvergenceReport operator_norm_convergence(const Semigroup& s, Index horizon, double tol,
                                            const std::optional<MatD>& reference) {
  if (horizon < 1) throw InvalidArgument("operator_norm_convergence: horizon must be >= 1");
  const WeightedSpace& space = s.space();
  const Index n = s.dim();
  MatD p;
  if (reference) {
    require_same_dim(n, reference->rows(), "operator_norm_convergence reference");
    require_same_dim(n, reference->cols(), "operator_norm_convergence reference");
    p = *reference;
  } else {
    p = detect_strong_convergence(s, std::max<Index>(horizon, 2), tol).terminal;
  }

  ConvergenceReport report;
  report.mode = ConvergenceReport::Mode::operator_norm;
  report.horizon_used = horizon;
  report.step = s.sample_step();
  report.tolerance = tol;

  const Index first_tail = horizon - tail_window(horizon) + 1;
  MatD x = MatD::Identity(n, n);
  VecD escaped_total = VecD::Zero(n);
  for (Index k = 1; k <= horizon; ++k) {
    VecD escaped;
    x = apply_tracked(s.step_operator(), x, escaped);
    escaped_total += escaped;
    const double residual = column_norm(space, x - p);
    report.residual_trace.emplace_back(static_cast<double>(k) * s.sample_step(), residual);
    if (k >= first_tail) report.tail_residual = std::max(report.tail_residual, residual);
  }
  report.terminal = p;
  fill_limit_defects(s, p, report);
  report.escaped_mass = escaped_total.cwiseQuotient(space.weights()).maxCoeff();
  report.approximate = s.approximate() || report.escaped_mass > tol;
  report.converged = report.tail_residual <= tol && report.projection_defect <= tol &&
                     report.commutation_defect <= tol;
  if (report.converged) report.limit = p;
  return report;
}

OrbitConvergence detect_orbit_convergence(const Semigroup& s, const VecD& f, Index horizon,
                                          double tol, const Norm& selector) {
  if (horizon < 2) throw InvalidArgument("detect_orbit_convergence: horizon must be >= 2");
  const WeightedSpace& space = s.space();
  space.check(f.size(), "detect_orbit_convergence");
  const Index first_tail = horizon - tail_window(horizon);
  OrbitConvergence out;
  std::vector<VecD> states;
  states.reserve(static_cast<std::size_t>(horizon));
  VecD x = f;
  for (Index k = 1; k <= horizon; ++k) {
    TrackedImage next = apply_tracked(s.step_operator(), x);
    out.escaped_mass += next.escaped;
    x = std::move(next.image);
    states.push_back(x);
  }
  for (Index k = 0; k < horizon; ++k) {
    out.distance_to_terminal.emplace_back(static_cast<double>(k + 1) * s.sample_step(),
                                          norm(space, VecD(states[k] - x), selector));
  }
  for (Index a = first_tail - 1; a < horizon; ++a) {
    for (Index b = a + 1; b < horizon; ++b) {
      out.tail_diameter =
          std::max(out.tail_diameter, norm(space, VecD(states[a] - states[b]), selector));
    }
  }
  out.terminal = x;
  out.converged = out.tail_diameter <= tol;
  return out;
}

std::vector<double> default_embedded_steps() { return {0.3, 1.0, std::sqrt(2.0)}; }

EmbeddedConsistencyReport embedded_discrete_consistency(const Semigroup& s,
                                                        std::vector<double> steps, Index horizon,
                                                        double tol) {
  if (s.mode() != Semigroup::Mode::continuous) {
    throw InvalidArgument("embedded_discrete_consistency: needs a continuous semigroup");
  }
  if (steps.empty()) steps = default_embedded_steps();
  for (std::size_t a = 0; a < steps.size(); ++a) {
    if (!(steps[a] > 0.0)) throw InvalidArgument("embedded_discrete_consistency: steps must be > 0");
    for (std::size_t b = 0; b < a; ++b) {
      if (steps[a] == steps[b]) throw InvalidArgument("embedded_discrete_consistency: repeated step");
    }
  }

  EmbeddedConsistencyReport report;
  report.steps = steps;
  report.tolerance = tol;
  bool all_converged = true;
  bool any_converged = false;
  for (double step : steps) {
    const Semigroup embedded = Semigroup::discrete(evaluate(s, step));
    report.embedded.push_back(detect_strong_convergence(embedded, horizon, tol));
    const ConvergenceReport& r = report.embedded.back();
    all_converged &= r.converged;
    any_converged |= r.converged;
    if (r.converged && r.rank == 1) report.rank_one_shortcut = true;
  }
  report.continuous = detect_strong_convergence(s, horizon, tol);

  if (all_converged) {
    for (std::size_t a = 0; a < report.embedded.size(); ++a) {
      for (std::size_t b = a + 1; b < report.embedded.size(); ++b) {
        report.max_pairwise_distance =
            std::max(report.max_pairwise_distance,
                     column_norm(s.space(), *report.embedded[a].limit - *report.embedded[b].limit));
      }
    }
    report.embedded_limits_coincide = report.max_pairwise_distance <= tol;
  }
  if (report.embedded_limits_coincide && report.continuous.converged) {
    const double gap =
        column_norm(s.space(), *report.embedded.front().limit - *report.continuous.limit);
    report.agrees_with_continuous = gap <= tol;
  }
  report.rank_one_prediction_verified = report.rank_one_shortcut && report.continuous.converged;
  report.discrepancy = any_converged && !report.continuous.converged;
  return report;
}

}  // namespace posg
