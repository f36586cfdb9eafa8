#pragma once

/**
 * @brief Dense symmetric eigensolvers.
 *
 * sym_eig is a cyclic Jacobi solver. gen_eig_spd reduces A w = lambda B w to
 * a standard problem through the Cholesky factor of B (Eigen's LLT).
 */

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "clda/core.hpp"

namespace clda {

/// Eigenvalues ascending; column i of vectors pairs with values[i].
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

namespace detail {

inline void require_square_finite(const Matrix& a, const char* name) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::ShapeMismatch, std::string(name) + " must be a non-empty square matrix");
  }
  if (!a.allFinite()) throw Error(ErrorCode::NonFinite, std::string(name) + " contains NaN or Inf");
}

/// Flip each column so that its entry of largest magnitude is non-negative.
inline void canonical_signs(Matrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index imax = 0;
    v.col(j).cwiseAbs().maxCoeff(&imax);
    if (v(imax, j) < 0.0) v.col(j) = -v.col(j);
  }
}

inline EigenPairs sorted_pairs(const Vector& values, const Matrix& vectors) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  EigenPairs out;
  out.values.resize(values.size());
  out.vectors.resize(vectors.rows(), vectors.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values(static_cast<Eigen::Index>(k)) = values(order[k]);
    out.vectors.col(static_cast<Eigen::Index>(k)) = vectors.col(order[k]);
  }
  return out;
}

}  // namespace detail

inline EigenPairs sym_eig(const Matrix& a_in, int max_sweeps = 100) {
  detail::require_square_finite(a_in, "sym_eig input");
  const Eigen::Index n = a_in.rows();
  Matrix a = 0.5 * (a_in + a_in.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();
  const double target = 1e-15 * scale;

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= target) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "Jacobi sweeps exceeded the iteration cap");

  EigenPairs out = detail::sorted_pairs(a.diagonal(), v);
  detail::canonical_signs(out.vectors);
  return out;
}

/// Solves A w = lambda B w for symmetric A and symmetric positive-definite B.
/// Returned vectors are B-orthonormal.
inline EigenPairs gen_eig_spd(const Matrix& a_in, const Matrix& b_in) {
  detail::require_square_finite(a_in, "gen_eig_spd A");
  detail::require_square_finite(b_in, "gen_eig_spd B");
  if (a_in.rows() != b_in.rows()) throw Error(ErrorCode::ShapeMismatch, "A and B differ in size");

  const Matrix a = 0.5 * (a_in + a_in.transpose());
  const Matrix b = 0.5 * (b_in + b_in.transpose());
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization of B failed");
  }
  const auto lower = llt.matrixL();
  const Matrix y = lower.solve(a);                         // L^-1 A
  Matrix c = lower.solve(Matrix(y.transpose()));           // L^-1 A L^-T
  c = 0.5 * (c + c.transpose()).eval();
  if (!c.allFinite()) throw Error(ErrorCode::NotPositiveDefinite, "B is numerically singular");

  EigenPairs std_pairs = sym_eig(c);
  EigenPairs out;
  out.values = std_pairs.values;
  out.vectors = llt.matrixU().solve(std_pairs.vectors);  // L^-T y
  detail::canonical_signs(out.vectors);
  return out;
}

}  // namespace clda
