#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "clda/core.hpp"
#include "clda/synth.hpp"

namespace clda::fixtures {

inline Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  return m;
}

/// Gaussian classes with shifted means; every class gets at least two samples.
inline Dataset random_dataset(Rng& rng, int n, int per_class, int c, double spread = 3.0) {
  Matrix x(n, per_class * c);
  std::vector<int> labels;
  for (int k = 0; k < c; ++k) {
    const Matrix mu = random_matrix(rng, n, 1, spread);
    for (int j = 0; j < per_class; ++j) {
      x.col(k * per_class + j) = mu.col(0) + random_matrix(rng, n, 1).col(0);
      labels.push_back(k + 1);
    }
  }
  return validate_dataset(std::move(x), labels);
}

inline Matrix random_spd(Rng& rng, int n) {
  const Matrix a = random_matrix(rng, n, n);
  return a * a.transpose() + 0.5 * Matrix::Identity(n, n);
}

inline Matrix random_orthogonal(Rng& rng, int n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

/// Largest principal angle (radians) between the column spans of a and b.
inline double max_principal_angle(const Matrix& a, const Matrix& b) {
  const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
  const double smin = std::min(1.0, svd.singularValues().minCoeff());
  return std::acos(smin);
}

}  // namespace clda::fixtures
