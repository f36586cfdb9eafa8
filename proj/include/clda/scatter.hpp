#pragma once

// Centered class matrices, classical scatters, and the reweighted scatters
// used by the capped solver.

#include <cmath>
#include <utility>
#include <vector>

#include "clda/core.hpp"

namespace clda {

/// Diagonals of the within-class (f, one per H_w column) and between-class
/// (g, one per class) weight matrices, with the indicator that produced them.
struct WeightDiag {
  Vector f;
  Vector g;
  std::vector<bool> active_f;
  std::vector<bool> active_g;

  bool any_active_f() const {
    for (bool a : active_f)
      if (a) return true;
    return false;
  }
  bool all_active() const {
    for (bool a : active_f)
      if (!a) return false;
    for (bool a : active_g)
      if (!a) return false;
    return true;
  }
};

inline ScatterPair build_centered(const Dataset& data, const ClassStats& stats) {
  const Matrix& x = data.features();
  const int c = data.num_classes();
  ScatterPair pair;
  pair.h_b.resize(x.rows(), c);
  for (int i = 0; i < c; ++i) {
    const double root_n = std::sqrt(static_cast<double>(stats.class_counts[static_cast<std::size_t>(i)]));
    pair.h_b.col(i) = root_n * (stats.class_means.col(i) - stats.global_mean);
  }
  pair.h_w.resize(x.rows(), x.cols());
  pair.sample_of_column.reserve(static_cast<std::size_t>(x.cols()));
  pair.class_of_column.reserve(static_cast<std::size_t>(x.cols()));
  Eigen::Index col = 0;
  for (int i = 1; i <= c; ++i) {
    for (Eigen::Index l = 0; l < x.cols(); ++l) {
      if (data.labels()[static_cast<std::size_t>(l)] != i) continue;
      pair.h_w.col(col++) = x.col(l) - stats.class_means.col(i - 1);
      pair.sample_of_column.push_back(static_cast<int>(l));
      pair.class_of_column.push_back(i);
    }
  }
  return pair;
}

/// S_b = H_b H_b^T / N.
inline Matrix between_scatter(const ScatterPair& pair) {
  return pair.h_b * pair.h_b.transpose() / static_cast<double>(pair.h_w.cols());
}

/// S_w = H_w H_w^T / N.
inline Matrix within_scatter(const ScatterPair& pair) {
  return pair.h_w * pair.h_w.transpose() / static_cast<double>(pair.h_w.cols());
}

namespace detail {

inline void reweight(const Matrix& projected, double epsilon, double zero_guard, Vector& weight,
                     std::vector<bool>& active) {
  weight.resize(projected.cols());
  active.assign(static_cast<std::size_t>(projected.cols()), false);
  for (Eigen::Index j = 0; j < projected.cols(); ++j) {
    const double r = projected.col(j).norm();
    if (!std::isfinite(r)) throw Error(ErrorCode::NonFinite, "projected norm is not finite");
    if (r <= epsilon) {
      weight(j) = 1.0 / std::max(r, zero_guard);
      active[static_cast<std::size_t>(j)] = true;
    } else {
      weight(j) = 0.0;
    }
  }
}

}  // namespace detail

/// Per-column weights 1/||W^T h|| for projected norms within epsilon, else 0.
/// The reciprocal is clamped at 1/zero_guard.
inline WeightDiag clda_weights(const Matrix& w, const ScatterPair& pair, double epsilon, double zero_guard) {
  if (w.rows() != pair.h_w.rows()) throw Error(ErrorCode::ShapeMismatch, "W rows differ from feature count");
  if (!w.allFinite()) throw Error(ErrorCode::NonFinite, "W contains NaN or Inf");
  WeightDiag wd;
  detail::reweight(w.transpose() * pair.h_w, epsilon, zero_guard, wd.f, wd.active_f);
  detail::reweight(w.transpose() * pair.h_b, epsilon, zero_guard, wd.g, wd.active_g);
  return wd;
}

struct WeightedScatters {
  Matrix s1;  // H_w F H_w^T
  Matrix s2;  // H_b G H_b^T
};

inline WeightedScatters weighted_scatters(const ScatterPair& pair, const WeightDiag& wd) {
  if (wd.f.size() != pair.h_w.cols() || wd.g.size() != pair.h_b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "weight lengths do not match the centered matrices");
  }
  WeightedScatters out;
  out.s1 = pair.h_w * wd.f.asDiagonal() * pair.h_w.transpose();
  out.s2 = pair.h_b * wd.g.asDiagonal() * pair.h_b.transpose();
  out.s1 = 0.5 * (out.s1 + out.s1.transpose()).eval();
  out.s2 = 0.5 * (out.s2 + out.s2.transpose()).eval();
  return out;
}

}  // namespace clda
