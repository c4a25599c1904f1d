#include "posg/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace posg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxMaximalRounds = 64;

VecD selector_column_norms(const WeightedSpace& space, const MatD& m, const Norm& selector) {
  switch (selector.kind) {
    case Norm::Kind::al:
      return m.cwiseAbs().transpose() * space.weights();
    case Norm::Kind::psi:
      return m.cwiseAbs().transpose() * selector.psi.coefficients.cwiseProduct(space.weights());
    case Norm::Kind::p:
      break;
  }
  VecD out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) out(j) = p_norm(space, m.col(j));
  return out;
}

// Column j: ||(x_j - h_j)^-|| in the selected norm.
VecD column_deficiencies(const WeightedSpace& space, const MatD& x, const MatD& h,
                         const Norm& selector) {
  return selector_column_norms(space, (h - x).cwiseMax(0.0), selector);
}

void require_nonnegative_vector(const VecD& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v(i) >= 0.0) || !std::isfinite(v(i))) {
      throw InvalidArgument(std::string(what) + ": entries must be finite and nonnegative");
    }
  }
}

void check_selector(const WeightedSpace& space, const Norm& selector) {
  if (selector.kind == Norm::Kind::p && !space.is_al()) {
    throw InvalidArgument("lower bounds: the native l^p norm is not additive on the cone; "
                          "use the AL or a psi norm");
  }
  if (selector.kind == Norm::Kind::psi) {
    space.check(selector.psi.dim(), "lower bounds psi");
    if (!selector.psi.is_strictly_positive()) {
      throw InvalidArgument("lower bounds: psi must be strictly positive");
    }
  }
}

Index validation_window(Index horizon) { return std::max<Index>(1, horizon / 2); }

// Tail-infimum estimates for a batch of starting vectors (one per column).
struct BatchTail {
  MatD bounds;
  VecD norms;
  std::vector<bool> fell_back;
  VecD validation;
  Trace trace;
  VecD escaped;
};

BatchTail batch_tail(const Semigroup& s, const MatD& starts, Index horizon, double shrink,
                     double tol, const Norm& selector) {
  const WeightedSpace& space = s.space();
  const PositiveOperator& step = s.step_operator();
  const Index cols = starts.cols();
  const Index first_tail = (horizon + 1) / 2;
  const Index extra = validation_window(horizon);

  MatD x = starts;
  MatD inf = MatD::Constant(starts.rows(), cols, kInf);
  for (Index k = 1; k <= horizon; ++k) {
    x = apply(step, x);
    if (k >= first_tail) inf = inf.cwiseMin(x);
  }

  BatchTail out;
  out.bounds = (shrink * inf).cwiseMax(0.0);
  out.validation = VecD::Zero(cols);
  out.escaped = VecD::Zero(cols);
  MatD per_step(horizon + extra, cols);
  x = starts;
  for (Index k = 1; k <= horizon + extra; ++k) {
    VecD escaped;
    x = apply_tracked(step, x, escaped);
    out.escaped += escaped;
    const VecD d = column_deficiencies(space, x, out.bounds, selector);
    per_step.row(k - 1) = d.transpose();
    if (k > horizon) out.validation = out.validation.cwiseMax(d);
  }

  out.fell_back.assign(static_cast<std::size_t>(cols), false);
  for (Index j = 0; j < cols; ++j) {
    if (out.validation(j) > tol) {
      out.bounds.col(j).setZero();
      out.fell_back[static_cast<std::size_t>(j)] = true;
      per_step.col(j).setZero();
    }
  }
  out.norms = selector_column_norms(space, out.bounds, selector);
  for (Index k = 0; k < per_step.rows(); ++k) {
    out.trace.emplace_back(static_cast<double>(k + 1) * s.sample_step(), per_step.row(k).maxCoeff());
  }
  return out;
}

double relative_escape(const WeightedSpace& space, const VecD& escaped, const MatD& starts) {
  const VecD mass = starts.cwiseAbs().transpose() * space.weights();
  double worst = 0.0;
  for (Index j = 0; j < escaped.size(); ++j) {
    if (mass(j) > 0.0) worst = std::max(worst, escaped(j) / mass(j));
  }
  return worst;
}

HypothesisCheck check(std::string name, bool ok, double value, std::string detail = {}) {
  return {std::move(name), ok ? HypothesisStatus::holds : HypothesisStatus::fails, value,
          std::move(detail)};
}

ConclusionStatus judge(bool hypothesis_holds, bool conclusion_ok, bool approximate) {
  if (!hypothesis_holds) return ConclusionStatus::not_applicable;
  if (conclusion_ok) return ConclusionStatus::verified;
  return approximate ? ConclusionStatus::inconclusive : ConclusionStatus::violated;
}

// min_j ||P e_j|| / ||e_j|| in the AL norm.
double limit_floor(const WeightedSpace& space, const MatD& p) {
  const VecD norms = p.cwiseAbs().transpose() * space.weights();
  return norms.cwiseQuotient(space.weights()).minCoeff();
}

struct VertexBounds {
  VecD norms;
  double escaped = 0.0;
  bool approximate = false;
};

VertexBounds vertex_bounds(const Semigroup& s, Index horizon, double tol,
                           const Norm& selector = Norm::al()) {
  const MatD starts = normalized_vertices(s.space(), selector);
  const BatchTail tail = batch_tail(s, starts, horizon, 1.0, tol, selector);
  VertexBounds out;
  out.norms = tail.norms;
  out.escaped = relative_escape(s.space(), tail.escaped, starts);
  out.approximate = s.approximate() || out.escaped > tol;
  return out;
}

double identity_defect(const Semigroup& s) {
  const Index n = s.dim();
  const MatD id = MatD::Identity(n, n);
  if (s.mode() == Semigroup::Mode::discrete) {
    return column_norm(s.space(), materialize(s.step_operator()) - id);
  }
  double defect = 0.0;
  for (double factor : {1.0, 2.0, 4.0}) {
    const MatD t = materialize(evaluate(s, factor * s.sample_step()));
    defect = std::max(defect, column_norm(s.space(), t - id));
  }
  return defect;
}

// Sup of the sampled ratios and whether it stopped growing over the second half.
std::pair<double, bool> domination_constant(const std::vector<double>& ratios) {
  const std::size_t half = ratios.size() / 2;
  double first = 0.0;
  double second = 0.0;
  for (std::size_t k = 0; k < half; ++k) first = std::max(first, ratios[k]);
  for (std::size_t k = half; k < ratios.size(); ++k) second = std::max(second, ratios[k]);
  const double m = std::max(first, second);
  const bool stable = std::isfinite(m) && second <= first * (1.0 + 1e-9) + 1e-300;
  return {m, stable};
}

}  // namespace

const char* to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::holds: return "holds";
    case HypothesisStatus::fails: return "fails";
    case HypothesisStatus::unknown: return "unknown";
  }
  return "unknown";
}

const char* to_string(ConclusionStatus status) {
  switch (status) {
    case ConclusionStatus::verified: return "verified";
    case ConclusionStatus::violated: return "violated";
    case ConclusionStatus::inconclusive: return "inconclusive";
    case ConclusionStatus::not_applicable: return "not_applicable";
  }
  return "not_applicable";
}

const char* to_string(LowerBoundReport::Kind kind) {
  switch (kind) {
    case LowerBoundReport::Kind::uniform: return "uniform";
    case LowerBoundReport::Kind::individual: return "individual";
    case LowerBoundReport::Kind::maximal: return "maximal";
    case LowerBoundReport::Kind::psi_weighted: return "psi_weighted";
  }
  return "uniform";
}

HypothesisStatus combine(const std::vector<HypothesisCheck>& checks) {
  bool all_hold = true;
  for (const auto& c : checks) {
    if (c.status == HypothesisStatus::fails) return HypothesisStatus::fails;
    all_hold &= c.status == HypothesisStatus::holds;
  }
  return all_hold ? HypothesisStatus::holds : HypothesisStatus::unknown;
}

MatD normalized_vertices(const WeightedSpace& space, const Norm& selector) {
  const MatD id = MatD::Identity(space.dim(), space.dim());
  const VecD norms = selector_column_norms(space, id, selector);
  return norms.cwiseInverse().asDiagonal();
}

LowerBoundReport uniform_lower_bound_check(const Semigroup& s, const VecD& h, Index horizon,
                                           double tol, const Norm& selector) {
  const WeightedSpace& space = s.space();
  space.check(h.size(), "uniform_lower_bound_check");
  require_nonnegative_vector(h, "uniform_lower_bound_check h");
  check_selector(space, selector);
  if (horizon < 2) throw InvalidArgument("uniform_lower_bound_check: horizon must be >= 2");

  LowerBoundReport report;
  report.kind = selector.kind == Norm::Kind::psi ? LowerBoundReport::Kind::psi_weighted
                                                 : LowerBoundReport::Kind::uniform;
  report.bound = h;
  report.norm_of_bound = norm(space, h, selector);
  report.horizon = horizon;
  report.tolerance = tol;

  const MatD starts = normalized_vertices(space, selector);
  const MatD target = h.replicate(1, starts.cols());
  const Index first_tail = horizon - std::max<Index>(1, horizon / 4);
  MatD x = starts;
  VecD escaped_total = VecD::Zero(starts.cols());
  bool settled = true;
  for (Index k = 1; k <= horizon; ++k) {
    VecD escaped;
    x = apply_tracked(s.step_operator(), x, escaped);
    escaped_total += escaped;
    const double sup = column_deficiencies(space, x, target, selector).maxCoeff();
    report.deficiency_trace.emplace_back(static_cast<double>(k) * s.sample_step(), sup);
    if (k >= first_tail && sup > tol) settled = false;
  }
  report.escaped_mass = relative_escape(space, escaped_total, starts);
  report.approximate = s.approximate() || report.escaped_mass > tol;
  report.certified = settled;
  report.hypothesis_log.push_back(
      check("bound is nonnegative", true, report.norm_of_bound, "norm of h"));
  return report;
}

LowerBoundReport individual_lower_bound_estimate(const Semigroup& s, const VecD& f, Index horizon,
                                                 double shrink_factor, double tol,
                                                 const Norm& selector) {
  const WeightedSpace& space = s.space();
  space.check(f.size(), "individual_lower_bound_estimate");
  require_nonnegative_vector(f, "individual_lower_bound_estimate f");
  if (f.isZero(0.0)) throw InvalidArgument("individual_lower_bound_estimate: f must be non-zero");
  if (!(shrink_factor > 0.0 && shrink_factor <= 1.0)) {
    throw InvalidArgument("individual_lower_bound_estimate: shrink factor must lie in (0, 1]");
  }
  check_selector(space, selector);
  if (horizon < 2) throw InvalidArgument("individual_lower_bound_estimate: horizon must be >= 2");

  const BatchTail tail = batch_tail(s, f, horizon, shrink_factor, tol, selector);
  LowerBoundReport report;
  report.kind = selector.kind == Norm::Kind::psi ? LowerBoundReport::Kind::psi_weighted
                                                 : LowerBoundReport::Kind::individual;
  report.bound = tail.bounds.col(0);
  report.norm_of_bound = tail.norms(0);
  report.deficiency_trace = tail.trace;
  report.fell_back_to_zero = tail.fell_back[0];
  report.certified = true;
  report.horizon = horizon;
  report.tolerance = tol;
  report.shrink_factor = shrink_factor;
  report.escaped_mass = relative_escape(space, tail.escaped, f);
  report.approximate = s.approximate() || report.escaped_mass > tol;
  report.hypothesis_log.push_back(check("validation window deficiency <= tol", !tail.fell_back[0],
                                        tail.validation(0),
                                        tail.fell_back[0] ? "candidate rejected, zero bound kept"
                                                          : "candidate kept"));
  return report;
}

LowerBoundReport maximal_lower_bound_estimate(const Semigroup& s, const VecD& f, Index horizon,
                                              double tol) {
  const WeightedSpace& space = s.space();
  const LowerBoundReport first = individual_lower_bound_estimate(s, f, horizon, 1.0, tol);
  LowerBoundReport report = first;
  report.kind = LowerBoundReport::Kind::maximal;

  VecD h = first.bound;
  double h_norm = al_norm(space, h);
  Index rounds = 0;
  while (rounds < kMaxMaximalRounds && h_norm > 0.0) {
    const BatchTail from_h = batch_tail(s, h, horizon, 1.0, tol, Norm::al());
    const VecD joined = join(h, VecD(from_h.bounds.col(0)));
    const double joined_norm = al_norm(space, joined);
    ++rounds;
    const double gain = joined_norm - h_norm;
    h = joined;
    h_norm = joined_norm;
    if (gain <= tol) break;
  }

  // Re-validate the final candidate on the orbit of f itself.
  VecD x = f;
  double validation = 0.0;
  Trace trace;
  const Index extra = validation_window(horizon);
  for (Index k = 1; k <= horizon + extra; ++k) {
    x = apply(s.step_operator(), x);
    const double d = deficiency(space, x, h);
    trace.emplace_back(static_cast<double>(k) * s.sample_step(), d);
    if (k > horizon) validation = std::max(validation, d);
  }

  report.rounds = rounds;
  if (validation <= tol) {
    report.bound = h;
    report.norm_of_bound = h_norm;
    report.deficiency_trace = std::move(trace);
    report.certified = true;
  } else {
    report.hypothesis_log.push_back(check("joined bound validates on the orbit of f", false,
                                          validation, "reverted to the individual estimate"));
  }
  const VecD moved = apply(s.step_operator(), report.bound);
  const double fixed_defect = norm(space, VecD(moved - report.bound), Norm::al());
  report.fixed_point = fixed_defect <= tol * std::max(1.0, report.norm_of_bound);
  report.hypothesis_log.push_back(check("T h = h", report.fixed_point, fixed_defect));
  const double bound = sampled_bound(s, horizon);
  report.hypothesis_log.push_back(check("||h|| <= sup_t ||T_t|| ||f||",
                                        report.norm_of_bound <= bound * al_norm(space, f) + tol,
                                        bound, "sampled estimate of sup_t ||T_t||"));
  return report;
}

CertifierReport lasota_yorke_certify(const Semigroup& s, const VecD& h, Index horizon, double tol) {
  const WeightedSpace& space = s.space();
  if (!space.is_al()) throw InvalidArgument("lasota_yorke_certify: needs AL mode");
  LowerBoundReport bound = uniform_lower_bound_check(s, h, horizon, tol);
  if (!bound.certified || !(bound.norm_of_bound > 0.0)) {
    throw PreconditionNotCertified(
        "lasota_yorke_certify: h is not a certified non-zero uniform lower bound (final "
        "deficiency " +
        std::to_string(bound.deficiency_trace.empty() ? 0.0 : bound.deficiency_trace.back().second) +
        ")");
  }
  const bool markov = s.conservative();

  CertifierReport report;
  report.theorem = markov ? "lasota-yorke" : "lasota-yorke-bounded";
  report.horizon = horizon;
  report.tolerance = tol;
  report.epsilon = bound.norm_of_bound;
  report.hypotheses.push_back(check("non-zero uniform lower bound", true, bound.norm_of_bound));
  const double sup_norm = sampled_bound(s, horizon);
  report.hypotheses.push_back(
      check("bounded (sampled)", std::isfinite(sup_norm), sup_norm, "estimate, not a proof"));
  report.hypothesis = combine(report.hypotheses);
  report.notes.push_back(markov ? "Markov semigroup" : "bounded positive semigroup");

  ConvergenceReport conv = detect_strong_convergence(s, horizon, tol);
  const MatD& p = conv.terminal;
  const VecD col = p.cwiseAbs().transpose() * space.weights();
  Index star = 0;
  col.cwiseQuotient(space.weights()).maxCoeff(&star);

  bool ok = conv.converged && conv.rank == 1 && col(star) > 0.0;
  if (col(star) > 0.0) {
    // P e_j = phi_j w_j f0 with f0 = P e_star / ||e_star|| (Markov) or normalized.
    VecD f0 = p.col(star) / (markov ? space.weight(star) : col(star));
    const double f0_norm = al_norm(space, f0);
    const VecD phi = col.cwiseQuotient(space.weights()) / f0_norm;
    const MatD predicted = f0 * phi.cwiseProduct(space.weights()).transpose();
    const double fit = column_norm(space, p - predicted);
    report.predicted_limit = predicted;
    report.fixed_vector = f0;
    report.limit_functional = phi;
    report.limit_floor = phi.minCoeff();
    ok &= fit <= 10.0 * tol && f0.minCoeff() >= -tol;
    report.notes.push_back("rank-1 factorization residual " + std::to_string(fit));
    if (markov) {
      ok &= std::abs(f0_norm - 1.0) <= 10.0 * tol;
      ok &= (phi.array() - 1.0).abs().maxCoeff() <= 10.0 * tol;
    } else {
      ok &= report.limit_floor >= report.epsilon * (1.0 - tol);
    }
  }
  report.approximate = conv.approximate || bound.approximate;
  report.conclusion = judge(report.hypothesis == HypothesisStatus::holds, ok, report.approximate);
  report.bound_report = std::move(bound);
  report.convergence = std::move(conv);
  return report;
}

CertifierReport individual_bounds_certify(const Semigroup& s, double epsilon, Index horizon,
                                          double tol) {
  if (!(epsilon > 0.0)) throw InvalidArgument("individual_bounds_certify: epsilon must be > 0");
  const WeightedSpace& space = s.space();
  CertifierReport report;
  report.theorem = s.conservative() ? "individual-bounds-markov" : "individual-bounds-bounded";
  report.horizon = horizon;
  report.tolerance = tol;
  report.epsilon = epsilon;

  const VertexBounds vb = vertex_bounds(s, horizon, tol);
  report.vertex_bound_norms = vb.norms;
  const double inf_norm = vb.norms.minCoeff();
  const bool hyp = inf_norm >= epsilon * (1.0 - tol);
  const double sup_norm = sampled_bound(s, horizon);
  report.hypotheses.push_back(
      check("bounded (sampled)", std::isfinite(sup_norm), sup_norm, "estimate, not a proof"));
  report.hypotheses.push_back(check("inf over vertices of ||h_f|| >= epsilon", hyp, inf_norm));
  if (vb.approximate) {
    report.notes.push_back("vertex orbits leak past the truncation boundary; bound norms are "
                           "estimates from the truncated orbits");
  }
  report.hypothesis = combine(report.hypotheses);

  ConvergenceReport conv = detect_strong_convergence(s, horizon, tol);
  report.limit_floor = limit_floor(space, conv.terminal);
  report.approximate = vb.approximate || conv.approximate;

  const bool forward_ok = conv.converged && report.limit_floor >= epsilon * (1.0 - tol);
  report.conclusion =
      judge(report.hypothesis == HypothesisStatus::holds, forward_ok, report.approximate);
  if (conv.converged && report.limit_floor >= epsilon) {
    report.converse = hyp ? ConclusionStatus::verified
                          : (report.approximate ? ConclusionStatus::inconclusive
                                                : ConclusionStatus::violated);
  }
  if (conv.converged) report.predicted_limit = conv.terminal;
  report.convergence = std::move(conv);
  return report;
}

CertifierReport domination_transfer(const Semigroup& dominating, const Semigroup& dominated,
                                    Index horizon, double tol) {
  if (!(dominating.space() == dominated.space())) {
    throw DimensionError("domination_transfer: semigroups act on different spaces");
  }
  if (dominating.positivity_exempt() || dominated.positivity_exempt()) {
    throw InvalidArgument("domination_transfer: both semigroups must be positive");
  }
  const WeightedSpace& space = dominating.space();
  CertifierReport report;
  report.theorem = "domination-transfer";
  report.horizon = horizon;
  report.tolerance = tol;

  const MatD starts = normalized_vertices(space);
  MatD xs = starts;
  MatD xt = starts;
  const Index first_tail = horizon - std::max<Index>(1, horizon / 4);
  double tail = 0.0;
  for (Index k = 1; k <= horizon; ++k) {
    xs = apply(dominating.step_operator(), xs);
    xt = apply(dominated.step_operator(), xt);
    if (k >= first_tail) {
      tail = std::max(tail, column_deficiencies(space, xs, xt, Norm::al()).maxCoeff());
    }
  }
  report.hypotheses.push_back(check("asymptotic domination on vertices", tail <= tol, tail));
  const double bound_dom = sampled_bound(dominating, horizon);
  const double bound_sub = sampled_bound(dominated, horizon);
  report.hypotheses.push_back(check("bounded (sampled)",
                                    std::isfinite(bound_dom) && std::isfinite(bound_sub),
                                    std::max(bound_dom, bound_sub), "estimate, not a proof"));

  const ConvergenceReport sub = detect_strong_convergence(dominated, horizon, tol);
  const double floor = sub.converged ? limit_floor(space, sub.terminal) : 0.0;
  report.epsilon = floor;
  report.hypotheses.push_back(check("dominated semigroup converges", sub.converged, sub.tail_residual));
  report.hypotheses.push_back(
      check("||P f|| >= eps ||f|| with eps > 0", floor > report.positivity_floor, floor));
  report.hypothesis = combine(report.hypotheses);
  if (report.hypothesis != HypothesisStatus::holds) {
    report.notes.push_back("hypotheses not met; no prediction made");
  }

  ConvergenceReport dom = detect_strong_convergence(dominating, horizon, tol);
  report.limit_floor = limit_floor(space, dom.terminal);
  report.approximate = sub.approximate || dom.approximate;
  report.conclusion =
      judge(report.hypothesis == HypothesisStatus::holds, dom.converged, report.approximate);
  if (dom.converged) report.predicted_limit = dom.terminal;
  report.convergence = std::move(dom);
  return report;
}

CertifierReport ding_certify(const Semigroup& s, Index horizon, double tol,
                             double positivity_floor) {
  if (s.positivity_exempt() || !adjoint_is_lattice_homomorphism(s.step_operator())) {
    throw StructuralGateError("ding_certify: the adjoint is not a lattice homomorphism");
  }
  const WeightedSpace& space = s.space();
  CertifierReport report;
  report.theorem = "ding";
  report.horizon = horizon;
  report.tolerance = tol;
  report.positivity_floor = positivity_floor;
  report.hypotheses.push_back(check("adjoint is a lattice homomorphism", true, 1.0, "structural"));

  const VertexBounds vb = vertex_bounds(s, horizon, tol);
  report.vertex_bound_norms = vb.norms;
  const double inf_norm = vb.norms.minCoeff();
  report.epsilon = inf_norm;
  report.hypotheses.push_back(
      check("every vertex has a non-zero lower bound", inf_norm >= positivity_floor, inf_norm));
  report.hypothesis = combine(report.hypotheses);

  ConvergenceReport conv = detect_strong_convergence(s, horizon, tol);
  report.limit_floor = limit_floor(space, conv.terminal);
  report.approximate = vb.approximate || conv.approximate;
  const bool ok = conv.converged && report.limit_floor >= positivity_floor;
  report.conclusion = judge(report.hypothesis == HypothesisStatus::holds, ok, report.approximate);
  if (conv.converged) report.predicted_limit = conv.terminal;
  report.convergence = std::move(conv);
  return report;
}

CertifierReport lattice_homo_rigidity(const Semigroup& s, Index horizon, double tol,
                                      double positivity_floor) {
  if (s.positivity_exempt() || !is_lattice_homomorphism(s.step_operator())) {
    throw StructuralGateError("lattice_homo_rigidity: the operators are not lattice homomorphisms");
  }
  const WeightedSpace& space = s.space();
  CertifierReport report;
  report.theorem = "lattice-homomorphism-rigidity";
  report.horizon = horizon;
  report.tolerance = tol;
  report.positivity_floor = positivity_floor;

  const VertexBounds vb = vertex_bounds(s, horizon, tol);
  report.vertex_bound_norms = vb.norms;
  const bool bounds_nonzero = vb.norms.minCoeff() >= positivity_floor;
  ConvergenceReport conv = detect_strong_convergence(s, horizon, tol);
  report.limit_floor = limit_floor(space, conv.terminal);
  const bool positive_limit = conv.converged && report.limit_floor >= positivity_floor;
  const double defect = identity_defect(s);
  const bool identity = defect <= tol;

  report.hypotheses.push_back(check("every vertex has a non-zero lower bound", bounds_nonzero,
                                    vb.norms.minCoeff()));
  report.hypotheses.push_back(
      check("strongly convergent with P f > 0", positive_limit, report.limit_floor));
  report.hypothesis = (bounds_nonzero || positive_limit) ? HypothesisStatus::holds
                                                         : HypothesisStatus::fails;
  report.notes.push_back("||T - I|| = " + std::to_string(defect));
  report.approximate = vb.approximate || conv.approximate;
  report.conclusion = judge(bounds_nonzero || positive_limit, identity, report.approximate);
  if (identity) {
    report.converse = bounds_nonzero ? ConclusionStatus::verified
                                     : (report.approximate ? ConclusionStatus::inconclusive
                                                           : ConclusionStatus::violated);
  }
  report.convergence = std::move(conv);
  return report;
}

CertifierReport psi_lower_bound_certify(const Semigroup& s, const VecD& h, const Functional& psi,
                                        const VecD& f0, Index horizon, double tol) {
  const WeightedSpace& space = s.space();
  space.check(psi.dim(), "psi_lower_bound_certify psi");
  space.check(f0.size(), "psi_lower_bound_certify f0");
  if (!psi.is_strictly_positive()) {
    throw InvalidArgument("psi_lower_bound_certify: psi must be strictly positive");
  }
  require_nonnegative_vector(f0, "psi_lower_bound_certify f0");
  const Norm selector = Norm::weighted_by(psi);

  CertifierReport report;
  report.horizon = horizon;
  report.tolerance = tol;

  const bool quasi_interior = f0.minCoeff() > 0.0;
  report.hypotheses.push_back(check("f0 is quasi-interior", quasi_interior, f0.minCoeff()));

  std::vector<double> f0_ratios;
  std::vector<double> psi_ratios;
  VecD x = f0;
  VecD phi = psi.coefficients;
  for (Index k = 1; k <= horizon; ++k) {
    x = apply(s.step_operator(), x);
    phi = adjoint_apply(s.step_operator(), Functional{phi}).coefficients;
    double rf = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
      if (x(i) > 0.0) rf = std::max(rf, f0(i) > 0.0 ? x(i) / f0(i) : kInf);
    }
    f0_ratios.push_back(rf);
    psi_ratios.push_back(phi.cwiseQuotient(psi.coefficients).maxCoeff());
  }
  const auto [m_f0, f0_stable] = domination_constant(f0_ratios);
  const auto [m_psi, psi_stable] = domination_constant(psi_ratios);
  report.hypotheses.push_back(check("T_t f0 <= M f0", quasi_interior && f0_stable, m_f0,
                                    f0_stable ? "smallest sampled M"
                                              : "M keeps growing over the horizon: no such M"));
  report.hypotheses.push_back(check("T_t' psi <= M psi", psi_stable, m_psi,
                                    psi_stable ? "smallest sampled M"
                                               : "M keeps growing over the horizon: no such M"));
  const double sup_norm = sampled_bound(s, horizon);
  report.hypotheses.push_back(
      check("bounded (sampled)", std::isfinite(sup_norm), sup_norm, "estimate, not a proof"));

  LowerBoundReport uniform = uniform_lower_bound_check(s, h, horizon, tol, selector);
  const bool uniform_ok = uniform.certified && uniform.norm_of_bound > 0.0;
  const VertexBounds vb = vertex_bounds(s, horizon, tol, selector);
  report.vertex_bound_norms = vb.norms;
  const double inf_individual = vb.norms.minCoeff();
  const bool individual_ok = inf_individual >= report.positivity_floor;

  const bool use_uniform = uniform_ok || !individual_ok;
  report.theorem = use_uniform ? "psi-uniform-lower-bound" : "psi-individual-lower-bounds";
  if (use_uniform) {
    report.hypotheses.push_back(
        check("non-zero uniform lower bound w.r.t. psi", uniform_ok, uniform.norm_of_bound));
    report.epsilon = uniform.norm_of_bound;
  } else {
    report.hypotheses.push_back(check("individual psi-bounds with positive infimum", individual_ok,
                                      inf_individual));
    report.epsilon = inf_individual;
  }
  report.notes.push_back("individual psi-bounds infimum " + std::to_string(inf_individual));
  report.hypothesis = combine(report.hypotheses);
  if (!quasi_interior || !f0_stable) {
    report.notes.push_back("missing f0 hypothesis: no quasi-interior f0 with T_t f0 <= M f0; "
                           "prediction declined");
  }

  ConvergenceReport conv = detect_strong_convergence(s, horizon, tol);
  report.approximate = uniform.approximate || vb.approximate || conv.approximate;
  bool ok = conv.converged;
  if (ok) {
    const MatD& p = conv.terminal;
    const VecD weighted = psi.coefficients.cwiseProduct(space.weights());
    const VecD adjoint = (p.transpose() * weighted).cwiseQuotient(space.weights());
    const double ratio = adjoint.cwiseQuotient(psi.coefficients).minCoeff();
    report.limit_floor = ratio;
    ok &= ratio >= report.epsilon * (1.0 - tol);
    if (use_uniform) ok &= conv.rank == 1;
    report.predicted_limit = p;
  }
  report.conclusion = judge(report.hypothesis == HypothesisStatus::holds, ok, report.approximate);
  report.bound_report = std::move(uniform);
  report.convergence = std::move(conv);
  return report;
}

}  // namespace posg
