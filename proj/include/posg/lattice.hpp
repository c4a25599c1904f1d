#pragma once

#include "posg/types.hpp"

#include <cmath>
#include <type_traits>
#include <utility>

namespace posg {

/**
 * @brief Finite atomic measure space: coordinates 0..dim-1 with strictly
 * positive weights w_i = mu({i}) and an exponent p >= 1.
 *
 * With p = 1 the weighted l^1 norm is additive on the positive cone (AL mode).
 * The scalar type of the weights matches the scalar type of the vectors
 * living over the space, so exact rational spaces carry rational weights.
 */
template <typename Scalar>
class BasicWeightedSpace {
 public:
  explicit BasicWeightedSpace(Vec<Scalar> weights, double p_exponent = 1.0);

  /// Unit weights (counting measure).
  static BasicWeightedSpace counting(Index dim, double p_exponent = 1.0);

  Index dim() const { return weights_.size(); }
  const Vec<Scalar>& weights() const { return weights_; }
  const Scalar& weight(Index i) const { return weights_(i); }
  double p_exponent() const { return p_; }
  bool is_al() const { return p_ == 1.0; }
  Scalar total_mass() const;

  /// Throws DimensionError unless `size` matches dim().
  void check(Index size, const char* what) const { require_same_dim(dim(), size, what); }

  bool operator==(const BasicWeightedSpace& other) const {
    return p_ == other.p_ && weights_ == other.weights_;
  }

 private:
  Vec<Scalar> weights_;
  double p_;
};

using WeightedSpace = BasicWeightedSpace<double>;
using RationalSpace = BasicWeightedSpace<Rational>;

/**
 * @brief Element of the dual, stored as a density with respect to the
 * weights: <psi, f> = sum_i psi_i f_i w_i.
 *
 * The norm functional of the AL space is the all-ones density.
 */
template <typename Scalar>
struct BasicFunctional {
  Vec<Scalar> coefficients;

  static BasicFunctional norm_functional(Index dim) {
    return {Vec<Scalar>::Constant(dim, Scalar(1))};
  }

  Index dim() const { return coefficients.size(); }
  bool is_positive() const { return (coefficients.array() >= Scalar(0)).all(); }
  bool is_strictly_positive() const { return (coefficients.array() > Scalar(0)).all(); }
};

using Functional = BasicFunctional<double>;

/// Neumaier-compensated sum for floating point; exact sum otherwise.
template <typename Derived>
typename Derived::Scalar compensated_sum(const Eigen::DenseBase<Derived>& terms) {
  using Scalar = typename Derived::Scalar;
  if constexpr (std::is_floating_point_v<Scalar>) {
    Scalar sum = 0;
    Scalar carry = 0;
    for (Index i = 0; i < terms.size(); ++i) {
      const Scalar x = terms.derived().coeff(i);
      const Scalar t = sum + x;
      if (std::abs(sum) >= std::abs(x)) {
        carry += (sum - t) + x;
      } else {
        carry += (x - t) + sum;
      }
      sum = t;
    }
    return sum + carry;
  } else {
    Scalar sum(0);
    for (Index i = 0; i < terms.size(); ++i) sum += terms.derived().coeff(i);
    return sum;
  }
}

template <typename Scalar>
struct Decomposition {
  Vec<Scalar> pos;
  Vec<Scalar> neg;
};

/// f = pos - neg with pos, neg >= 0 and pos ^ neg = 0.
template <typename Derived>
Decomposition<typename Derived::Scalar> decompose(const Eigen::MatrixBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  return {f.cwiseMax(Scalar(0)), (-f).cwiseMax(Scalar(0))};
}

template <typename A, typename B>
Vec<typename A::Scalar> join(const Eigen::MatrixBase<A>& f, const Eigen::MatrixBase<B>& g) {
  require_same_dim(f.size(), g.size(), "join");
  return f.cwiseMax(g);
}

template <typename A, typename B>
Vec<typename A::Scalar> meet(const Eigen::MatrixBase<A>& f, const Eigen::MatrixBase<B>& g) {
  require_same_dim(f.size(), g.size(), "meet");
  return f.cwiseMin(g);
}

/// (f)^- as a vector.
template <typename Derived>
Vec<typename Derived::Scalar> negative_part(const Eigen::MatrixBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  return (-f).cwiseMax(Scalar(0));
}

template <typename Scalar, typename Derived>
Scalar al_norm(const BasicWeightedSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f) {
  space.check(f.size(), "al_norm");
  return compensated_sum(space.weights().cwiseProduct(f.cwiseAbs()));
}

/// (sum_i w_i |f_i|^p)^(1/p); exact for rational scalars only when p = 1.
template <typename Scalar, typename Derived>
Scalar p_norm(const BasicWeightedSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f) {
  if (space.is_al()) return al_norm(space, f);
  if constexpr (std::is_floating_point_v<Scalar>) {
    space.check(f.size(), "p_norm");
    const double p = space.p_exponent();
    // Scale by the largest entry so |f_i|^p cannot overflow or underflow.
    const Scalar scale = f.cwiseAbs().maxCoeff();
    if (scale == Scalar(0)) return Scalar(0);
    Vec<Scalar> terms(f.size());
    for (Index i = 0; i < f.size(); ++i) {
      terms(i) = space.weight(i) * std::pow(std::abs(f(i)) / scale, p);
    }
    return scale * std::pow(compensated_sum(terms), 1.0 / p);
  } else {
    throw InvalidArgument("p_norm: exact scalars support only p = 1");
  }
}

template <typename Scalar, typename Derived>
Scalar psi_norm(const BasicWeightedSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f,
                const BasicFunctional<Scalar>& psi) {
  space.check(f.size(), "psi_norm");
  space.check(psi.dim(), "psi_norm");
  return compensated_sum(psi.coefficients.cwiseProduct(space.weights()).cwiseProduct(f.cwiseAbs()));
}

/// <psi, f> = sum_i psi_i f_i w_i.
template <typename Scalar, typename Derived>
Scalar pair(const BasicWeightedSpace<Scalar>& space, const BasicFunctional<Scalar>& psi,
            const Eigen::MatrixBase<Derived>& f) {
  space.check(f.size(), "pair");
  space.check(psi.dim(), "pair");
  return compensated_sum(psi.coefficients.cwiseProduct(space.weights()).cwiseProduct(f));
}

/// The native norm of the space: l^1 in AL mode, weighted l^p otherwise.
template <typename Scalar, typename Derived>
Scalar space_norm(const BasicWeightedSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f) {
  return space.is_al() ? al_norm(space, f) : p_norm(space, f);
}

/// Selects which norm a deficiency or distance is measured in.
template <typename Scalar>
struct BasicNorm {
  enum class Kind { al, p, psi };
  Kind kind = Kind::al;
  BasicFunctional<Scalar> psi{};

  static BasicNorm al() { return {Kind::al, {}}; }
  static BasicNorm p() { return {Kind::p, {}}; }
  static BasicNorm weighted_by(BasicFunctional<Scalar> functional) {
    return {Kind::psi, std::move(functional)};
  }
};

using Norm = BasicNorm<double>;

template <typename Scalar, typename Derived>
Scalar norm(const BasicWeightedSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f,
            const BasicNorm<Scalar>& selector) {
  switch (selector.kind) {
    case BasicNorm<Scalar>::Kind::al:
      return al_norm(space, f);
    case BasicNorm<Scalar>::Kind::p:
      return p_norm(space, f);
    case BasicNorm<Scalar>::Kind::psi:
      return psi_norm(space, f, selector.psi);
  }
  return Scalar(0);
}

/// ||(f - h)^-|| in the selected norm. Zero iff f >= h.
template <typename Scalar, typename A, typename B>
Scalar deficiency(const BasicWeightedSpace<Scalar>& space, const Eigen::MatrixBase<A>& f,
                  const Eigen::MatrixBase<B>& h,
                  const BasicNorm<Scalar>& selector = BasicNorm<Scalar>::al()) {
  require_same_dim(f.size(), h.size(), "deficiency");
  const Vec<Scalar> shortfall = (h - f).cwiseMax(Scalar(0));
  return norm(space, shortfall, selector);
}

/// Weighted unit vector e_j / ||e_j|| in the native norm.
template <typename Scalar>
Vec<Scalar> vertex(const BasicWeightedSpace<Scalar>& space, Index j) {
  Vec<Scalar> e = Vec<Scalar>::Zero(space.dim());
  e(j) = Scalar(1);
  return e / space_norm(space, e);
}

template <typename Scalar>
Vec<Scalar> unit(Index dim, Index j) {
  Vec<Scalar> e = Vec<Scalar>::Zero(dim);
  e(j) = Scalar(1);
  return e;
}

extern template class BasicWeightedSpace<double>;
extern template class BasicWeightedSpace<Rational>;

}  // namespace posg
