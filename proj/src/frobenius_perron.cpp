#include "posg/frobenius_perron.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace posg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::pair<double, double> domain(const Branch& b) {
  return std::visit([](const auto& br) { return std::make_pair(br.lo, br.hi); }, b);
}

// Exact when x * n is an integer (the double x is converted to a dyadic rational exactly).
bool on_grid(const Rational& x, Index n) {
  const Rational scaled = x * Rational(n);
  return boost::multiprecision::denominator(scaled) == 1;
}

Rational overlap(const Rational& a0, const Rational& a1, const Rational& b0, const Rational& b1) {
  const Rational lo = std::max(a0, b0);
  const Rational hi = std::min(a1, b1);
  return hi > lo ? hi - lo : Rational(0);
}

}  // namespace

IntervalMap::IntervalMap(std::vector<Branch> branches) : branches_(std::move(branches)) {
  if (branches_.empty()) throw InvalidArgument("IntervalMap: needs at least one branch");
  std::sort(branches_.begin(), branches_.end(),
            [](const Branch& a, const Branch& b) { return domain(a).first < domain(b).first; });
  double expected = 0.0;
  for (const auto& b : branches_) {
    const auto [lo, hi] = domain(b);
    if (lo != expected || !(hi > lo)) {
      throw InvalidArgument("IntervalMap: branch domains must partition [0, 1)");
    }
    expected = hi;
    if (const auto* affine = std::get_if<AffineBranch>(&b)) {
      if (affine->slope == 0.0 || !std::isfinite(affine->slope) || !std::isfinite(affine->intercept)) {
        throw InvalidArgument("IntervalMap: affine branch must have a finite non-zero slope");
      }
      const double y0 = affine->slope * lo + affine->intercept;
      const double y1 = affine->slope * hi + affine->intercept;
      if (std::min(y0, y1) < 0.0 || std::max(y0, y1) > 1.0) {
        throw InvalidArgument("IntervalMap: affine branch maps outside [0, 1]");
      }
    } else if (!std::get<CallableBranch>(b).map) {
      throw InvalidArgument("IntervalMap: callable branch without a map");
    }
  }
  if (expected != 1.0) throw InvalidArgument("IntervalMap: branch domains must partition [0, 1)");
}

IntervalMap IntervalMap::doubling() {
  return IntervalMap({AffineBranch{0.0, 0.5, 2.0, 0.0}, AffineBranch{0.5, 1.0, 2.0, -1.0}});
}

IntervalMap IntervalMap::tent() {
  return IntervalMap({AffineBranch{0.0, 0.5, 2.0, 0.0}, AffineBranch{0.5, 1.0, -2.0, 2.0}});
}

IntervalMap IntervalMap::identity() { return IntervalMap({AffineBranch{0.0, 1.0, 1.0, 0.0}}); }

bool IntervalMap::piecewise_affine() const {
  return std::all_of(branches_.begin(), branches_.end(),
                     [](const Branch& b) { return std::holds_alternative<AffineBranch>(b); });
}

double IntervalMap::operator()(double x) const {
  for (const auto& b : branches_) {
    const auto [lo, hi] = domain(b);
    if (x >= lo && x < hi) {
      return std::visit(overloaded{
                            [x](const AffineBranch& a) { return a.slope * x + a.intercept; },
                            [x](const CallableBranch& c) { return c.map(x); },
                        },
                        b);
    }
  }
  throw InvalidArgument("IntervalMap: point outside [0, 1)");
}

PositiveOperator ulam_matrix(const IntervalMap& map, Index n_cells) {
  if (n_cells < 2) throw InvalidArgument("ulam_matrix: n_cells must be >= 2");
  const Rational n(n_cells);
  std::vector<Triplet> triplets;
  bool exact = true;
  for (const auto& branch : map.branches()) {
    const auto [lo_d, hi_d] = domain(branch);
    const Rational lo(lo_d);
    const Rational hi(hi_d);
    exact &= on_grid(lo, n_cells) && on_grid(hi, n_cells);
    const Index first = static_cast<Index>(std::floor(lo_d * static_cast<double>(n_cells)));
    const Index last = std::min<Index>(
        n_cells - 1, static_cast<Index>(std::ceil(hi_d * static_cast<double>(n_cells))));
    for (Index j = std::max<Index>(first, 0); j <= last; ++j) {
      const Rational c0 = Rational(j) / n;
      const Rational c1 = Rational(j + 1) / n;
      const Rational a = std::max(lo, c0);
      const Rational b = std::min(hi, c1);
      if (!(b > a)) continue;
      if (const auto* affine = std::get_if<AffineBranch>(&branch)) {
        const Rational s(affine->slope);
        const Rational t(affine->intercept);
        Rational y0 = s * a + t;
        Rational y1 = s * b + t;
        if (y1 < y0) std::swap(y0, y1);
        exact &= on_grid(y0, n_cells) && on_grid(y1, n_cells);
        const Rational abs_s = s < 0 ? Rational(-s) : s;
        const Index i0 = std::max<Index>(0, static_cast<Index>(std::floor(y0.convert_to<double>() * n_cells)) - 1);
        const Index i1 = std::min<Index>(n_cells - 1, static_cast<Index>(std::ceil(y1.convert_to<double>() * n_cells)));
        for (Index i = i0; i <= i1; ++i) {
          const Rational len = overlap(y0, y1, Rational(i) / n, Rational(i + 1) / n);
          if (len > 0) triplets.emplace_back(i, j, (len / abs_s * n).convert_to<double>());
        }
      } else {
        const auto& callable = std::get<CallableBranch>(branch);
        if (!callable.preimage_measure) {
          throw UnsupportedBranch("ulam_matrix: callable branch without a preimage quadrature");
        }
        exact = false;
        const double a_d = a.convert_to<double>();
        const double b_d = b.convert_to<double>();
        for (Index i = 0; i < n_cells; ++i) {
          const double m = callable.preimage_measure(a_d, b_d, static_cast<double>(i) / n_cells,
                                                     static_cast<double>(i + 1) / n_cells);
          if (m > 0.0) triplets.emplace_back(i, j, m * static_cast<double>(n_cells));
        }
      }
    }
  }
  const WeightedSpace space(VecD::Constant(n_cells, 1.0 / static_cast<double>(n_cells)));
  return PositiveOperator::sparse(space, triplets).with_approximate(!exact);
}

PositiveOperator fp_of_finite_map(const FiniteMap& map) {
  const WeightedSpace& space = map.space;
  const Index n = space.dim();
  require_same_dim(n, static_cast<Index>(map.sigma.size()), "fp_of_finite_map");
  VecD gains(n);
  for (Index j = 0; j < n; ++j) {
    const Index target = map.sigma[static_cast<std::size_t>(j)];
    if (target < 0 || target >= n) throw DimensionError("fp_of_finite_map: sigma leaves the space");
    gains(j) = space.weight(j) / space.weight(target);
  }
  return PositiveOperator::transport(space, map.sigma, gains);
}

PositiveOperator koopman(const PositiveOperator& op) {
  const WeightedSpace& space = op.space();
  const VecD& w = space.weights();
  const Index n = space.dim();
  if (const auto* t = std::get_if<TransportKernel>(&op.kernel())) {
    std::vector<Triplet> triplets;
    for (Index j = 0; j < n; ++j) {
      const Index i = t->sigma[static_cast<std::size_t>(j)];
      if (t->gains(j) != 0.0) triplets.emplace_back(j, i, t->gains(j) * w(i) / w(j));
    }
    return PositiveOperator::sparse(space, triplets).with_approximate(op.approximate());
  }
  if (const auto* s = std::get_if<SparseKernel>(&op.kernel())) {
    SparseD adjoint = w.cwiseInverse().asDiagonal() * SparseD(s->matrix.transpose()) * w.asDiagonal();
    return PositiveOperator::sparse(space, std::move(adjoint)).with_approximate(op.approximate());
  }
  const MatD m = materialize(op);
  const MatD adjoint = w.cwiseInverse().asDiagonal() * m.transpose() * w.asDiagonal();
  return PositiveOperator::dense(space, adjoint).with_approximate(op.approximate());
}

bool is_measure_preserving(const PositiveOperator& op, double tol) {
  const VecD one = VecD::Ones(op.dim());
  return (apply(op, one) - one).cwiseAbs().maxCoeff() <= tol;
}

VecD invariant_density(const PositiveOperator& op, double tol, Index max_iter) {
  if (!is_markov(op, 1e-10)) throw InvalidArgument("invariant_density: operator is not Markov");
  const WeightedSpace& space = op.space();
  const Index n = space.dim();
  VecD x = VecD::LinSpaced(n, 1.0, static_cast<double>(n));
  x /= al_norm(space, x);
  for (Index k = 0; k < max_iter; ++k) {
    VecD next = apply(op, x);
    next /= al_norm(space, next);
    const double step = al_norm(space, VecD(next - x));
    x = std::move(next);
    if (step <= tol) return x;
  }
  throw NonConvergence("invariant_density: no fixed density after " + std::to_string(max_iter) +
                       " iterations (periodic or non-ergodic operator)");
}

}  // namespace posg
