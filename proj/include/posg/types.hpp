#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>

namespace posg {

using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VecD = Vec<double>;
using MatD = Mat<double>;

/// Exact rational scalar for the dyadic gallery operators. Expression
/// templates are off so the type composes with Eigen expressions.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

using VecQ = Vec<Rational>;
using MatQ = Mat<Rational>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Error hierarchy. Non-convergence of a diagnostic is never an error; these
// signal misuse or an unmet precondition.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

/// Target passed to the interval-preservation witness lies outside [Tf, Tg].
struct InfeasibleTarget : Error {
  using Error::Error;
};

/// The hypothesis a certifier relies on did not certify.
struct PreconditionNotCertified : Error {
  using Error::Error;
};

/// Structural (sparsity-pattern) hypothesis of a certifier is violated.
struct StructuralGateError : Error {
  using Error::Error;
};

/// Power iteration did not settle; usually periodicity, not a bug.
struct NonConvergence : Error {
  using Error::Error;
};

struct UnsupportedBranch : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

inline void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace posg
