#include "posg/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace posg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool nonnegative_finite(double x) { return std::isfinite(x) && x >= 0.0; }

template <typename Derived>
void require_nonnegative(const Eigen::DenseBase<Derived>& values, const char* what) {
  for (Index i = 0; i < values.size(); ++i) {
    if (!nonnegative_finite(values.derived().coeff(i))) {
      throw InvalidArgument(std::string(what) + ": entries must be finite and nonnegative");
    }
  }
}

void require_square(const WeightedSpace& space, Index rows, Index cols, const char* what) {
  require_same_dim(space.dim(), rows, what);
  require_same_dim(space.dim(), cols, what);
}

// Batch application; escaped mass per column is accumulated into `escaped`.
MatD apply_batch(const PositiveOperator& op, const MatD& x, VecD& escaped) {
  const WeightedSpace& space = op.space();
  const Index n = space.dim();
  return std::visit(
      overloaded{
          [&](const DenseKernel& k) -> MatD { return k.matrix * x; },
          [&](const SparseKernel& k) -> MatD { return k.matrix * x; },
          [&](const RankOneKernel& k) -> MatD {
            const Eigen::RowVectorXd pairing =
                k.functional.coefficients.cwiseProduct(space.weights()).transpose() * x;
            return k.vector * pairing;
          },
          [&](const ShiftKernel& k) -> MatD {
            MatD y = MatD::Zero(n, x.cols());
            if (n > 1) y.bottomRows(n - 1) = x.topRows(n - 1);
            escaped += k.boundary_weight * x.row(n - 1).cwiseAbs().transpose();
            return y;
          },
          [&](const DiagonalKernel& k) -> MatD { return k.multiplier.asDiagonal() * x; },
          [&](const TransportKernel& k) -> MatD {
            MatD y = MatD::Zero(n, x.cols());
            for (Index j = 0; j < n; ++j) {
              if (k.gains(j) != 0.0) y.row(k.sigma[j]) += k.gains(j) * x.row(j);
            }
            return y;
          },
          [&](const SumKernel& k) -> MatD {
            MatD y = MatD::Zero(n, x.cols());
            for (const auto& term : k.terms) y += apply_batch(term, x, escaped);
            return y;
          },
          [&](const ComposeKernel& k) -> MatD {
            MatD y = x;
            for (auto it = k.factors.rbegin(); it != k.factors.rend(); ++it) {
              y = apply_batch(*it, y, escaped);
            }
            return y;
          },
      },
      op.kernel());
}

VecD adjoint_coefficients(const PositiveOperator& op, const VecD& psi) {
  const WeightedSpace& space = op.space();
  const VecD& w = space.weights();
  const Index n = space.dim();
  return std::visit(
      overloaded{
          [&](const DenseKernel& k) -> VecD {
            return (k.matrix.transpose() * w.cwiseProduct(psi)).cwiseQuotient(w);
          },
          [&](const SparseKernel& k) -> VecD {
            return (k.matrix.transpose() * w.cwiseProduct(psi)).cwiseQuotient(w);
          },
          [&](const RankOneKernel& k) -> VecD {
            const double value = compensated_sum(psi.cwiseProduct(w).cwiseProduct(k.vector));
            return value * k.functional.coefficients;
          },
          [&](const ShiftKernel&) -> VecD {
            VecD out = VecD::Zero(n);
            for (Index j = 0; j + 1 < n; ++j) out(j) = psi(j + 1) * w(j + 1) / w(j);
            return out;
          },
          [&](const DiagonalKernel& k) -> VecD { return k.multiplier.cwiseProduct(psi); },
          [&](const TransportKernel& k) -> VecD {
            VecD out(n);
            for (Index j = 0; j < n; ++j) {
              const Index i = k.sigma[j];
              out(j) = k.gains(j) * psi(i) * w(i) / w(j);
            }
            return out;
          },
          [&](const SumKernel& k) -> VecD {
            VecD out = VecD::Zero(n);
            for (const auto& term : k.terms) out += adjoint_coefficients(term, psi);
            return out;
          },
          [&](const ComposeKernel& k) -> VecD {
            VecD out = psi;
            for (const auto& factor : k.factors) out = adjoint_coefficients(factor, out);
            return out;
          },
      },
      op.kernel());
}

std::vector<Index> merge_sorted(const std::vector<Index>& a, const std::vector<Index>& b) {
  std::vector<Index> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Pattern compose_patterns(const Pattern& outer, const Pattern& inner) {
  Pattern out{outer.rows, std::vector<std::vector<Index>>(inner.columns.size())};
  for (std::size_t j = 0; j < inner.columns.size(); ++j) {
    std::vector<Index> rows;
    for (Index k : inner.columns[j]) rows = merge_sorted(rows, outer.columns[k]);
    out.columns[j] = std::move(rows);
  }
  return out;
}

}  // namespace

PositiveOperator PositiveOperator::make(WeightedSpace space, Kernel kernel, bool approximate,
                                        bool exempt) {
  return PositiveOperator(std::make_shared<const Node>(
      Node{std::move(space), std::move(kernel), approximate, exempt}));
}

PositiveOperator PositiveOperator::dense(WeightedSpace space, MatD matrix) {
  require_square(space, matrix.rows(), matrix.cols(), "dense operator");
  require_nonnegative(matrix, "dense operator");
  return make(std::move(space), DenseKernel{std::move(matrix)});
}

PositiveOperator PositiveOperator::exempt_dense(WeightedSpace space, MatD matrix) {
  require_square(space, matrix.rows(), matrix.cols(), "exempt dense operator");
  if (!matrix.allFinite()) throw InvalidArgument("exempt dense operator: non-finite entry");
  return make(std::move(space), DenseKernel{std::move(matrix)}, false, true);
}

PositiveOperator PositiveOperator::sparse(WeightedSpace space,
                                          const std::vector<Triplet>& triplets) {
  const Index n = space.dim();
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.row() >= n || t.col() < 0 || t.col() >= n) {
      throw DimensionError("sparse operator: triplet index out of range");
    }
    if (!nonnegative_finite(t.value())) {
      throw InvalidArgument("sparse operator: entries must be finite and nonnegative");
    }
  }
  SparseD matrix(n, n);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  matrix.makeCompressed();
  return make(std::move(space), SparseKernel{std::move(matrix)});
}

PositiveOperator PositiveOperator::sparse(WeightedSpace space, SparseD matrix) {
  require_square(space, matrix.rows(), matrix.cols(), "sparse operator");
  for (Index j = 0; j < matrix.outerSize(); ++j) {
    for (SparseD::InnerIterator it(matrix, j); it; ++it) {
      if (!nonnegative_finite(it.value())) {
        throw InvalidArgument("sparse operator: entries must be finite and nonnegative");
      }
    }
  }
  matrix.makeCompressed();
  return make(std::move(space), SparseKernel{std::move(matrix)});
}

PositiveOperator PositiveOperator::rank_one(WeightedSpace space, Functional functional,
                                            VecD vector) {
  space.check(functional.dim(), "rank-one operator");
  space.check(vector.size(), "rank-one operator");
  require_nonnegative(functional.coefficients, "rank-one functional");
  require_nonnegative(vector, "rank-one vector");
  return make(std::move(space), RankOneKernel{std::move(functional), std::move(vector)});
}

PositiveOperator PositiveOperator::right_shift(WeightedSpace space,
                                               std::optional<double> boundary_weight) {
  const double bw = boundary_weight.value_or(space.weight(space.dim() - 1));
  if (!(std::isfinite(bw) && bw > 0.0)) {
    throw InvalidArgument("right shift: boundary weight must be strictly positive");
  }
  return make(std::move(space), ShiftKernel{bw});
}

PositiveOperator PositiveOperator::diagonal(WeightedSpace space, VecD multiplier) {
  space.check(multiplier.size(), "diagonal operator");
  require_nonnegative(multiplier, "diagonal operator");
  return make(std::move(space), DiagonalKernel{std::move(multiplier)});
}

PositiveOperator PositiveOperator::transport(WeightedSpace space, std::vector<Index> sigma,
                                             VecD gains) {
  const Index n = space.dim();
  require_same_dim(n, static_cast<Index>(sigma.size()), "transport sigma");
  space.check(gains.size(), "transport gains");
  for (Index target : sigma) {
    if (target < 0 || target >= n) throw DimensionError("transport: sigma maps outside the space");
  }
  require_nonnegative(gains, "transport gains");
  return make(std::move(space), TransportKernel{std::move(sigma), std::move(gains)});
}

PositiveOperator PositiveOperator::identity(WeightedSpace space) {
  VecD ones = VecD::Ones(space.dim());
  return diagonal(std::move(space), std::move(ones));
}

PositiveOperator PositiveOperator::sum(std::vector<PositiveOperator> terms) {
  if (terms.empty()) throw InvalidArgument("sum: needs at least one term");
  bool approximate = false;
  bool exempt = false;
  for (const auto& t : terms) {
    if (!(t.space() == terms.front().space())) throw DimensionError("sum: terms on different spaces");
    approximate |= t.approximate();
    exempt |= t.positivity_exempt();
  }
  WeightedSpace space = terms.front().space();
  return make(std::move(space), SumKernel{std::move(terms)}, approximate, exempt);
}

PositiveOperator PositiveOperator::compose(std::vector<PositiveOperator> factors) {
  if (factors.empty()) throw InvalidArgument("compose: needs at least one factor");
  bool approximate = false;
  bool exempt = false;
  for (const auto& f : factors) {
    if (!(f.space() == factors.front().space())) {
      throw DimensionError("compose: factors on different spaces");
    }
    approximate |= f.approximate();
    exempt |= f.positivity_exempt();
  }
  WeightedSpace space = factors.front().space();
  return make(std::move(space), ComposeKernel{std::move(factors)}, approximate, exempt);
}

PositiveOperator PositiveOperator::with_approximate(bool flag) const {
  return make(node_->space, node_->kernel, flag, node_->exempt);
}

const char* PositiveOperator::kind_name() const {
  return std::visit(overloaded{
                        [](const DenseKernel&) { return "dense"; },
                        [](const SparseKernel&) { return "sparse"; },
                        [](const RankOneKernel&) { return "rank_one"; },
                        [](const ShiftKernel&) { return "shift"; },
                        [](const DiagonalKernel&) { return "diagonal"; },
                        [](const TransportKernel&) { return "transport"; },
                        [](const SumKernel&) { return "sum"; },
                        [](const ComposeKernel&) { return "compose"; },
                    },
                    kernel());
}

VecD apply(const PositiveOperator& op, const VecD& f) { return apply_tracked(op, f).image; }

TrackedImage apply_tracked(const PositiveOperator& op, const VecD& f) {
  op.space().check(f.size(), "apply");
  VecD escaped = VecD::Zero(1);
  MatD y = apply_batch(op, f, escaped);
  return {y.col(0), escaped(0)};
}

MatD apply(const PositiveOperator& op, const MatD& columns) {
  VecD escaped;
  return apply_tracked(op, columns, escaped);
}

MatD apply_tracked(const PositiveOperator& op, const MatD& columns, VecD& escaped) {
  op.space().check(columns.rows(), "apply");
  escaped = VecD::Zero(columns.cols());
  return apply_batch(op, columns, escaped);
}

Functional adjoint_apply(const PositiveOperator& op, const Functional& phi) {
  op.space().check(phi.dim(), "adjoint_apply");
  return {adjoint_coefficients(op, phi.coefficients)};
}

MatD materialize(const PositiveOperator& op, Index cap) {
  if (op.dim() > cap) {
    throw InvalidArgument("materialize: dimension " + std::to_string(op.dim()) +
                          " exceeds the dense cap " + std::to_string(cap));
  }
  if (const auto* dense = std::get_if<DenseKernel>(&op.kernel())) return dense->matrix;
  return apply(op, MatD(MatD::Identity(op.dim(), op.dim())));
}

double weighted_operator_norm(const WeightedSpace& space, const MatD& matrix) {
  require_square(space, matrix.rows(), matrix.cols(), "weighted_operator_norm");
  double best = 0.0;
  for (Index j = 0; j < matrix.cols(); ++j) {
    const double column = compensated_sum(space.weights().cwiseProduct(matrix.col(j).cwiseAbs()));
    best = std::max(best, column / space.weight(j));
  }
  return best;
}

double weighted_operator_norm(const PositiveOperator& op) {
  return weighted_operator_norm(op.space(), materialize(op));
}

VecD column_leak(const PositiveOperator& op) {
  if (op.dim() > kDenseMaterializationCap) {
    throw InvalidArgument("column_leak: dimension exceeds the dense cap");
  }
  VecD escaped;
  apply_tracked(op, MatD(MatD::Identity(op.dim(), op.dim())), escaped);
  return escaped.cwiseQuotient(op.space().weights());
}

double markov_defect(const PositiveOperator& op) {
  const Functional one = Functional::norm_functional(op.dim());
  const VecD image = adjoint_apply(op, one).coefficients;
  const VecD leak = column_leak(op);
  return (image + leak - one.coefficients).cwiseAbs().maxCoeff();
}

bool is_markov(const PositiveOperator& op, double tol) {
  if (op.positivity_exempt() || !op.space().is_al()) return false;
  return markov_defect(op) <= tol;
}

std::size_t Pattern::max_per_column() const {
  std::size_t best = 0;
  for (const auto& c : columns) best = std::max(best, c.size());
  return best;
}

std::size_t Pattern::max_per_row() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(rows), 0);
  for (const auto& c : columns) {
    for (Index i : c) ++counts[static_cast<std::size_t>(i)];
  }
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

Pattern structural_pattern(const PositiveOperator& op) {
  const Index n = op.dim();
  Pattern pattern{n, std::vector<std::vector<Index>>(static_cast<std::size_t>(n))};
  auto& cols = pattern.columns;
  std::visit(overloaded{
                 [&](const DenseKernel& k) {
                   for (Index j = 0; j < n; ++j) {
                     for (Index i = 0; i < n; ++i) {
                       if (k.matrix(i, j) != 0.0) cols[j].push_back(i);
                     }
                   }
                 },
                 [&](const SparseKernel& k) {
                   for (Index j = 0; j < n; ++j) {
                     for (SparseD::InnerIterator it(k.matrix, j); it; ++it) {
                       if (it.value() != 0.0) cols[j].push_back(it.row());
                     }
                   }
                 },
                 [&](const RankOneKernel& k) {
                   std::vector<Index> rows;
                   for (Index i = 0; i < n; ++i) {
                     if (k.vector(i) != 0.0) rows.push_back(i);
                   }
                   for (Index j = 0; j < n; ++j) {
                     if (k.functional.coefficients(j) != 0.0) cols[j] = rows;
                   }
                 },
                 [&](const ShiftKernel&) {
                   for (Index j = 0; j + 1 < n; ++j) cols[j].push_back(j + 1);
                 },
                 [&](const DiagonalKernel& k) {
                   for (Index j = 0; j < n; ++j) {
                     if (k.multiplier(j) != 0.0) cols[j].push_back(j);
                   }
                 },
                 [&](const TransportKernel& k) {
                   for (Index j = 0; j < n; ++j) {
                     if (k.gains(j) != 0.0) cols[j].push_back(k.sigma[j]);
                   }
                 },
                 [&](const SumKernel& k) {
                   for (const auto& term : k.terms) {
                     const Pattern p = structural_pattern(term);
                     for (Index j = 0; j < n; ++j) cols[j] = merge_sorted(cols[j], p.columns[j]);
                   }
                 },
                 [&](const ComposeKernel& k) {
                   Pattern acc = structural_pattern(k.factors.back());
                   for (auto it = std::next(k.factors.rbegin()); it != k.factors.rend(); ++it) {
                     acc = compose_patterns(structural_pattern(*it), acc);
                   }
                   cols = std::move(acc.columns);
                 },
             },
             op.kernel());
  return pattern;
}

bool is_lattice_homomorphism(const PositiveOperator& op) {
  return !op.positivity_exempt() && structural_pattern(op).max_per_row() <= 1;
}

bool adjoint_is_lattice_homomorphism(const PositiveOperator& op) {
  return !op.positivity_exempt() && structural_pattern(op).max_per_column() <= 1;
}

VecD interval_preservation_witness(const PositiveOperator& op, const VecD& f, const VecD& g,
                                   const VecD& y, double tol) {
  const Index n = op.dim();
  op.space().check(f.size(), "interval witness");
  op.space().check(g.size(), "interval witness");
  op.space().check(y.size(), "interval witness");
  const Pattern pattern = structural_pattern(op);
  if (op.positivity_exempt() || pattern.max_per_column() > 1) {
    throw StructuralGateError("interval witness: adjoint is not a lattice homomorphism");
  }
  for (Index j = 0; j < n; ++j) {
    if (f(j) > g(j)) throw InfeasibleTarget("interval witness: f is not below g");
  }
  const VecD tf = apply(op, f);
  const VecD tg = apply(op, g);
  for (Index i = 0; i < n; ++i) {
    if (y(i) < tf(i) - tol * (1.0 + std::abs(tf(i))) || y(i) > tg(i) + tol * (1.0 + std::abs(tg(i)))) {
      throw InfeasibleTarget("interval witness: target outside [Tf, Tg] at index " +
                             std::to_string(i));
    }
  }
  // Gain of column j onto its single row: T e_j = gain_j e_{row_j}.
  const MatD matrix = materialize(op, std::max(n, kDenseMaterializationCap));
  VecD slack = (y - tf).cwiseMax(0.0);
  VecD x = f;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (Index j = 0; j < n; ++j) {
    if (pattern.columns[j].empty()) continue;
    const Index row = pattern.columns[j].front();
    const double gain = matrix(row, j);
    if (gain <= 0.0 || slack(row) <= 0.0) continue;
    const double room = g(j) - f(j);
    double step = slack(row) / gain;
    if (step >= room * (1.0 - 8.0 * eps)) step = room;
    x(j) = (step == room) ? g(j) : f(j) + step;
    slack(row) = std::max(0.0, slack(row) - gain * step);
  }
  return x;
}

}  // namespace posg
