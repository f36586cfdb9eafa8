#pragma once

// Capped l_{p,q} matrix "norms": each column's l_p norm raised to q is clipped
// at epsilon before summation. Not homogeneous, so not a true norm, but for
// p, q >= 1 it is non-negative and satisfies the triangle inequality.

#include <algorithm>
#include <cmath>
#include <limits>

#include "clda/core.hpp"

namespace clda {

struct CappedNormParams {
  double p = 2.0;
  double q = 1.0;
  double epsilon = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(p > 0.0) || !(q > 0.0) || !(epsilon > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "capped norm requires p > 0, q > 0, epsilon > 0");
    }
  }
};

namespace detail {

inline void require_finite(const Matrix& m) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix contains NaN or Inf");
}

}  // namespace detail

/// Vector l_p norm; zero vector has norm 0 for every p.
template <class Derived>
double lp_norm(const Eigen::MatrixBase<Derived>& v, double p) {
  if (p == 2.0) return v.norm();
  if (p == 1.0) return v.template lpNorm<1>();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), p);
  return s == 0.0 ? 0.0 : std::pow(s, 1.0 / p);
}

/// (sum_j min(||m_j||_p^q, epsilon))^(1/q). Epsilon is compared against the
/// q-th power of each column norm.
inline double capped_lpq(const Matrix& m, const CappedNormParams& params) {
  params.validate();
  detail::require_finite(m);
  double s = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    s += std::min(std::pow(lp_norm(m.col(j), params.p), params.q), params.epsilon);
  }
  return std::pow(s, 1.0 / params.q);
}

/// Uncapped l_{p,q}: (sum_j ||m_j||_p^q)^(1/q).
inline double lpq_norm(const Matrix& m, double p, double q) {
  return capped_lpq(m, {p, q, std::numeric_limits<double>::infinity()});
}

/// Sum of column l_2 norms.
inline double l21_norm(const Matrix& m) {
  detail::require_finite(m);
  return m.colwise().norm().sum();
}

}  // namespace clda
