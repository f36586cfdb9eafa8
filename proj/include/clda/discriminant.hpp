#pragma once

/**
 * @brief Classical LDA and capped l_{2,1}-norm LDA.
 *
 * The capped solver minimizes
 *
 *   sum_{i,j} min(||W^T (x_i^j - m_i)||, eps) / sum_i min(||sqrt(N_i) W^T (m_i - m)||, eps)
 *
 * by repeatedly reweighting the within/between scatters (S_1 = H_w F H_w^T,
 * S_2 = H_b G H_b^T) at the current W and taking the generalized eigenvectors
 * of S_1 w = lambda S_2 w with the d smallest nonzero eigenvalues.
 *
 * Conventions:
 *  - W starts as the first d columns of the identity.
 *  - Each column of an iterate is rescaled to unit Euclidean norm, so eps is
 *    measured in data units at every iterate.
 *  - An update that would raise the objective ratio is rejected and the solve
 *    stops with Projection::stalled set. CldaOptions::monotone_guard = false
 *    keeps every update (diagnostics only; the trace is then not monotone).
 *  - When every between-class term is capped, S_2 vanishes and the ridge is
 *    taken relative to tr(S_1); the step then minimizes the within-class term
 *    alone.
 */

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "clda/core.hpp"
#include "clda/linalg.hpp"
#include "clda/scatter.hpp"

namespace clda {

struct CldaObjective {
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = std::numeric_limits<double>::infinity();
};

struct CldaOptions : CldaConfig {
  bool monotone_guard = true;
};

/// Called after every reweighting with the iteration index, the W the
/// weights were computed at, and the weights themselves.
using IterationObserver = std::function<void(int, const Matrix&, const WeightDiag&)>;

namespace detail {

inline double capped_sum(const Matrix& projected, double epsilon) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < projected.cols(); ++j) s += std::min(projected.col(j).norm(), epsilon);
  return s;
}

/// Objective without the degenerate-denominator check; ratio is +inf when the
/// denominator vanishes.
inline CldaObjective evaluate_objective(const Matrix& w, const ScatterPair& pair, double epsilon) {
  CldaObjective obj;
  obj.numerator = capped_sum(w.transpose() * pair.h_w, epsilon);
  obj.denominator = capped_sum(w.transpose() * pair.h_b, epsilon);
  obj.ratio = obj.denominator > 0.0 ? obj.numerator / obj.denominator : std::numeric_limits<double>::infinity();
  return obj;
}

inline void require_two_classes(const Dataset& data) {
  if (data.num_classes() < 2) {
    throw Error(ErrorCode::InvalidArgument, "discriminant analysis needs at least two classes");
  }
}

inline void normalize_columns(Matrix& w) {
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const double nrm = w.col(j).norm();
    if (nrm > 0.0) w.col(j) /= nrm;
  }
}

}  // namespace detail

inline CldaObjective clda_objective(const Matrix& w, const ScatterPair& pair, double epsilon) {
  if (w.rows() != pair.h_w.rows()) throw Error(ErrorCode::ShapeMismatch, "W rows differ from feature count");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  CldaObjective obj = detail::evaluate_objective(w, pair, epsilon);
  if (obj.denominator == 0.0) {
    throw Error(ErrorCode::DegenerateDenominator, "all projected between-class terms are zero");
  }
  return obj;
}

/// Top-d generalized eigenvectors of S_b w = lambda (S_w + ridge * tr(S_w)/n * I) w.
/// The single trace entry is ||W^T H_b||_F^2 / ||W^T H_w||_F^2.
inline Projection lda_fit(const Dataset& data, int d, double ridge = 1e-8) {
  detail::require_two_classes(data);
  const int n = data.num_features();
  if (d < 1 || d > n) throw Error(ErrorCode::InvalidArgument, "d must be in [1, n]");
  if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge must be non-negative");

  const ScatterPair pair = build_centered(data, class_stats(data));
  const Matrix sb = between_scatter(pair);
  const Matrix sw = within_scatter(pair);
  const double shift = ridge * sw.trace() / n;

  EigenPairs eig;
  try {
    eig = gen_eig_spd(sb, sw + shift * Matrix::Identity(n, n));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    throw Error(ErrorCode::SingularWithinScatter, "within-class scatter plus ridge is not positive definite");
  }

  const double rank_tol = 1e-10 * eig.values.cwiseAbs().maxCoeff();
  int nonzero = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > rank_tol) ++nonzero;
  if (d > nonzero) {
    throw Error(ErrorCode::DimensionTooLarge,
                "d = " + std::to_string(d) + " exceeds the " + std::to_string(nonzero) + " nonzero discriminant directions");
  }

  Projection out;
  out.w.resize(n, d);
  for (int k = 0; k < d; ++k) out.w.col(k) = eig.vectors.col(n - 1 - k);
  const double num = (out.w.transpose() * pair.h_b).squaredNorm();
  const double den = (out.w.transpose() * pair.h_w).squaredNorm();
  out.objective_trace.push_back(den > 0.0 ? num / den : std::numeric_limits<double>::infinity());
  out.iterations = 1;
  out.converged = true;
  return out;
}

/// Capped solver starting from an explicit W (n x d).
inline Projection clda_fit(const Dataset& data, const CldaOptions& cfg, const Matrix& w_init,
                           const IterationObserver& observer = {}) {
  detail::require_two_classes(data);
  const int n = data.num_features();
  cfg.validate(n);
  if (w_init.rows() != n || w_init.cols() != cfg.d) {
    throw Error(ErrorCode::ShapeMismatch, "initial W must be n x d");
  }

  const ScatterPair pair = build_centered(data, class_stats(data));
  const Matrix eye = Matrix::Identity(n, n);

  Projection out;
  out.w = w_init;
  double current = detail::evaluate_objective(out.w, pair, cfg.epsilon).ratio;
  out.objective_trace.push_back(current);

  for (int t = 0; t < cfg.max_iter; ++t) {
    const WeightDiag wd = clda_weights(out.w, pair, cfg.epsilon, cfg.zero_guard);
    if (observer) observer(t, out.w, wd);
    if (!wd.any_active_f()) {
      throw Error(ErrorCode::AllSamplesCapped, "every within-class residual exceeds epsilon");
    }
    const WeightedScatters s = weighted_scatters(pair, wd);
    const double base = s.s2.trace() > 0.0 ? s.s2.trace() : s.s1.trace();
    const double shift = cfg.ridge * base / n;

    EigenPairs eig;
    try {
      eig = gen_eig_spd(s.s1, s.s2 + shift * eye);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
      throw Error(ErrorCode::SingularBetweenScatter,
                  "weighted between-class scatter plus ridge is not positive definite at iteration " + std::to_string(t));
    }
    ++out.iterations;

    // d smallest eigenvalues above the rank tolerance, padded from the bottom.
    const double rank_tol = 1e-10 * eig.values.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> picked;
    for (Eigen::Index i = 0; i < n && static_cast<int>(picked.size()) < cfg.d; ++i)
      if (eig.values(i) > rank_tol) picked.push_back(i);
    if (static_cast<int>(picked.size()) < cfg.d) {
      out.padded = true;
      for (Eigen::Index i = 0; i < n && static_cast<int>(picked.size()) < cfg.d; ++i)
        if (eig.values(i) <= rank_tol) picked.push_back(i);
    }
    Matrix next(n, cfg.d);
    for (int k = 0; k < cfg.d; ++k) next.col(k) = eig.vectors.col(picked[static_cast<std::size_t>(k)]);
    detail::normalize_columns(next);

    const double candidate = detail::evaluate_objective(next, pair, cfg.epsilon).ratio;
    if (cfg.monotone_guard && !(candidate <= current * (1.0 + 1e-12) || !std::isfinite(current))) {
      out.stalled = true;
      break;
    }
    out.w = std::move(next);
    out.objective_trace.push_back(candidate);
    const double prev = current;
    current = candidate;
    if (std::isfinite(prev) && std::abs(current - prev) <= cfg.tol * std::max(1.0, prev)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

/// Capped solver from the first d identity columns.
inline Projection clda_fit(const Dataset& data, const CldaOptions& cfg, const IterationObserver& observer = {}) {
  const int n = data.num_features();
  cfg.validate(n);
  return clda_fit(data, cfg, Matrix::Identity(n, n).leftCols(cfg.d), observer);
}

inline Projection clda_fit(const Dataset& data, const CldaConfig& cfg) {
  CldaOptions opts;
  static_cast<CldaConfig&>(opts) = cfg;
  return clda_fit(data, opts);
}

/// W^T x for a single sample or a matrix of samples (columns).
inline Matrix project(const Projection& p, const Matrix& x) {
  if (x.rows() != p.w.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(x.rows()) + " rows, projection expects " +
                                              std::to_string(p.w.rows()));
  }
  return p.w.transpose() * x;
}

inline Vector project(const Projection& p, const Vector& x) {
  if (x.size() != p.w.rows()) throw Error(ErrorCode::ShapeMismatch, "vector length differs from projection rows");
  return p.w.transpose() * x;
}

}  // namespace clda
