#include "posg/lattice.hpp"

#include <cmath>
#include <string>

namespace posg {

namespace {

bool finite_positive(double w) { return std::isfinite(w) && w > 0.0; }
bool finite_positive(const Rational& w) { return w > 0; }

}  // namespace

template <typename Scalar>
BasicWeightedSpace<Scalar>::BasicWeightedSpace(Vec<Scalar> weights, double p_exponent)
    : weights_(std::move(weights)), p_(p_exponent) {
  if (weights_.size() < 1) throw InvalidArgument("WeightedSpace: dim must be >= 1");
  if (!(p_ >= 1.0) || !std::isfinite(p_)) {
    throw InvalidArgument("WeightedSpace: p must be a finite real >= 1");
  }
  for (Index i = 0; i < weights_.size(); ++i) {
    if (!finite_positive(weights_(i))) {
      throw InvalidArgument("WeightedSpace: weight " + std::to_string(i) +
                            " is not strictly positive and finite");
    }
  }
}

template <typename Scalar>
BasicWeightedSpace<Scalar> BasicWeightedSpace<Scalar>::counting(Index dim, double p_exponent) {
  if (dim < 1) throw InvalidArgument("WeightedSpace: dim must be >= 1");
  return BasicWeightedSpace(Vec<Scalar>::Constant(dim, Scalar(1)), p_exponent);
}

template <typename Scalar>
Scalar BasicWeightedSpace<Scalar>::total_mass() const {
  return compensated_sum(weights_);
}

template class BasicWeightedSpace<double>;
template class BasicWeightedSpace<Rational>;

}  // namespace posg
