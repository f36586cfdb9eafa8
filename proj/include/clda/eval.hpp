#pragma once

/**
 * @brief 1-NN evaluation on projected data and seeded k-fold cross-validation
 * with a parameter grid.
 *
 * Each fold is min-max normalized to [0, 1] with statistics from its training
 * part only. Grid points are independent and may run on several threads;
 * results are always reduced in grid order, then fold order.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "clda/core.hpp"
#include "clda/discriminant.hpp"
#include "clda/scatter.hpp"
#include "clda/synth.hpp"

namespace clda {

/// Label of the Euclidean-nearest training column for every test column;
/// ties go to the lowest training index.
inline std::vector<int> nn_classify(const Matrix& train_proj, std::span<const int> train_labels,
                                    const Matrix& test_proj) {
  if (train_proj.cols() == 0) throw Error(ErrorCode::EmptyTrainSet, "no training samples");
  if (train_proj.cols() != static_cast<Eigen::Index>(train_labels.size())) {
    throw Error(ErrorCode::ShapeMismatch, "training labels do not match training columns");
  }
  if (train_proj.rows() != test_proj.rows()) throw Error(ErrorCode::ShapeMismatch, "train/test dimensions differ");
  std::vector<int> out(static_cast<std::size_t>(test_proj.cols()));
  for (Eigen::Index t = 0; t < test_proj.cols(); ++t) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < train_proj.cols(); ++j) {
      const double dist = (train_proj.col(j) - test_proj.col(t)).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    out[static_cast<std::size_t>(t)] = train_labels[static_cast<std::size_t>(best)];
  }
  return out;
}

/// Empirical quantile with linear interpolation between order statistics
/// (position p * (m - 1) in the sorted sample).
inline double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct EpsilonGrid {
  std::vector<double> values;  // ascending, unique
  bool degenerate = false;     // a zero candidate was replaced by zero_guard
};

/// Quantiles of the within-class residual norms under the initial projection
/// (first d identity columns).
inline EpsilonGrid epsilon_grid(const Dataset& data, int d, std::span<const double> quantiles,
                                double zero_guard = 1e-8) {
  if (d < 1 || d > data.num_features()) throw Error(ErrorCode::InvalidArgument, "d out of range for epsilon grid");
  const ScatterPair pair = build_centered(data, class_stats(data));
  const Vector norms = pair.h_w.topRows(d).colwise().norm().transpose();
  const std::vector<double> sample(norms.data(), norms.data() + norms.size());
  EpsilonGrid grid;
  for (double q : quantiles) {
    if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantiles must lie in (0, 1]");
    double eps = quantile(sample, q);
    if (eps <= 0.0) {
      eps = zero_guard;
      grid.degenerate = true;
    }
    grid.values.push_back(eps);
  }
  std::sort(grid.values.begin(), grid.values.end());
  grid.values.erase(std::unique(grid.values.begin(), grid.values.end()), grid.values.end());
  return grid;
}

/// sqrt(d) * max_i ||sqrt(N_i) (m_i - m)||: no W with unit-norm columns can
/// project a between-class column beyond this.
inline double between_bound(const Dataset& data, int d) {
  const ScatterPair pair = build_centered(data, class_stats(data));
  return std::sqrt(static_cast<double>(d)) * pair.h_b.colwise().norm().maxCoeff();
}

enum class Method { Lda, Clda };

inline std::string_view to_string(Method m) { return m == Method::Lda ? "lda" : "clda"; }

/// How epsilon is derived from a training set.
struct EpsilonRule {
  enum class Kind { WithinQuantile, BetweenMultiple, Absolute };
  Kind kind = Kind::WithinQuantile;
  double value = 0.9;

  double resolve(const Dataset& train, int d, double zero_guard = 1e-8) const {
    switch (kind) {
      case Kind::WithinQuantile: {
        const double q[] = {value};
        return epsilon_grid(train, d, q, zero_guard).values.front();
      }
      case Kind::BetweenMultiple: return value * between_bound(train, d);
      case Kind::Absolute: return value;
    }
    return value;
  }

  /// "within_q0.9", "between_x2", "abs0.5".
  std::string describe() const {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    const std::string v(buf, res.ptr);
    switch (kind) {
      case Kind::WithinQuantile: return "within_q" + v;
      case Kind::BetweenMultiple: return "between_x" + v;
      case Kind::Absolute: return "abs" + v;
    }
    return v;
  }
};

struct GridPoint {
  int d = 1;
  EpsilonRule epsilon;  // ignored for LDA
  double ridge = 1e-8;
};

inline const std::vector<double>& default_within_quantiles() {
  static const std::vector<double> q = {0.5, 0.7, 0.8, 0.9, 0.95, 1.0};
  return q;
}

inline const std::vector<double>& default_between_multiples() {
  static const std::vector<double> m = {1.0, 2.0};
  return m;
}

/// LDA: d in 1..min(n, c-1). CLDA: d in 1..min(n, c), crossed with the
/// within-class quantile rules and the between-class bound multiples.
inline std::vector<GridPoint> default_grid(Method method, int n, int c) {
  std::vector<GridPoint> grid;
  if (method == Method::Lda) {
    for (int d = 1; d <= std::min(n, c - 1); ++d) grid.push_back({d, {}, 1e-8});
    return grid;
  }
  for (int d = 1; d <= std::min(n, c); ++d) {
    for (double q : default_within_quantiles()) grid.push_back({d, {EpsilonRule::Kind::WithinQuantile, q}, 1e-8});
    for (double m : default_between_multiples()) grid.push_back({d, {EpsilonRule::Kind::BetweenMultiple, m}, 1e-8});
  }
  return grid;
}

struct CvOptions {
  int k = 10;
  Method method = Method::Clda;
  std::vector<GridPoint> grid;  // empty: default_grid
  std::uint64_t seed = 0;
  int threads = 1;
  bool normalize = true;
  std::optional<NoiseSpec> train_noise;  // applied to each training part after normalization
  int max_iter = 50;
  double tol = 1e-6;
  double zero_guard = 1e-8;
};

struct EvalReport {
  double accuracy = 0.0;  // percent, mean of per_fold
  std::vector<double> per_fold;
  double std_dev = 0.0;  // sample standard deviation of per_fold
  GridPoint chosen;
  double mean_epsilon = 0.0;  // average resolved epsilon over successful folds (CLDA)
  bool stratified = true;
  int failed_folds = 0;
  std::vector<std::string> diagnostics;
  std::vector<double> grid_accuracy;  // mean CV accuracy per grid point, NaN when every fold failed
};

/// Fold index (0..k-1) for every sample. Stratified by class when every class
/// has at least k samples; otherwise a plain shuffled round-robin.
inline std::vector<int> make_folds(const Dataset& data, int k, std::uint64_t seed, bool* stratified = nullptr) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
  if (k > data.num_samples()) throw Error(ErrorCode::InvalidArgument, "more folds than samples");
  Rng rng(derive_seed(seed, 0xF01D));
  const auto& counts = data.class_counts();
  const bool strat = std::all_of(counts.begin(), counts.end(), [k](int n) { return n >= k; });
  if (stratified) *stratified = strat;

  std::vector<int> fold(static_cast<std::size_t>(data.num_samples()), 0);
  int next = 0;
  auto deal = [&](std::vector<int>& members) {
    rng.shuffle(members);
    for (int s : members) {
      fold[static_cast<std::size_t>(s)] = next;
      next = (next + 1) % k;
    }
  };
  if (strat) {
    for (int cls = 1; cls <= data.num_classes(); ++cls) {
      std::vector<int> members;
      for (int s = 0; s < data.num_samples(); ++s)
        if (data.labels()[static_cast<std::size_t>(s)] == cls) members.push_back(s);
      deal(members);
    }
  } else {
    std::vector<int> members(static_cast<std::size_t>(data.num_samples()));
    std::iota(members.begin(), members.end(), 0);
    deal(members);
  }
  return fold;
}

struct MinMaxScaler {
  Vector lo;
  Vector range;

  static MinMaxScaler fit(const Matrix& x) {
    MinMaxScaler s;
    s.lo = x.rowwise().minCoeff();
    s.range = x.rowwise().maxCoeff() - s.lo;
    return s;
  }

  /// Constant features map to 0.
  Matrix apply(const Matrix& x) const {
    Matrix out = x.colwise() - lo;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      if (range(i) > 0.0)
        out.row(i) /= range(i);
      else
        out.row(i).setZero();
    }
    return out;
  }
};

/// Fits the method on train and returns 1-NN accuracy (percent) on test.
/// Test labels are matched to training labels by their original names.
inline double fit_and_score(const Dataset& train, const Dataset& test, Method method, const GridPoint& gp,
                            const CvOptions& opts, double* used_epsilon = nullptr) {
  Projection proj;
  if (method == Method::Lda) {
    proj = lda_fit(train, gp.d, gp.ridge);
  } else {
    CldaOptions cfg;
    cfg.d = gp.d;
    cfg.ridge = gp.ridge;
    cfg.max_iter = opts.max_iter;
    cfg.tol = opts.tol;
    cfg.zero_guard = opts.zero_guard;
    cfg.epsilon = gp.epsilon.resolve(train, gp.d, opts.zero_guard);
    if (used_epsilon) *used_epsilon = cfg.epsilon;
    proj = clda_fit(train, cfg);
  }
  const std::vector<int> pred = nn_classify(project(proj, train.features()), train.labels(), project(proj, test.features()));
  int correct = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    if (train.name_of(pred[t]) == test.name_of(test.labels()[t])) ++correct;
  }
  return 100.0 * correct / static_cast<double>(pred.size());
}

namespace detail {

struct FoldData {
  Dataset train;
  Dataset test;
};

inline std::vector<FoldData> build_folds(const Dataset& data, const CvOptions& opts, bool& stratified) {
  const std::vector<int> fold = make_folds(data, opts.k, opts.seed, &stratified);
  std::vector<FoldData> out;
  out.reserve(static_cast<std::size_t>(opts.k));
  for (int f = 0; f < opts.k; ++f) {
    std::vector<int> tr, te;
    for (int s = 0; s < data.num_samples(); ++s) (fold[static_cast<std::size_t>(s)] == f ? te : tr).push_back(s);
    Dataset train = subset(data, tr);
    Dataset test = subset(data, te);
    if (opts.normalize) {
      const MinMaxScaler scaler = MinMaxScaler::fit(train.features());
      train = with_features(train, scaler.apply(train.features()));
      test = with_features(test, scaler.apply(test.features()));
    }
    if (opts.train_noise) {
      NoiseSpec spec = *opts.train_noise;
      spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(f));
      train = add_gaussian_noise(train, spec);
    }
    out.push_back({std::move(train), std::move(test)});
  }
  return out;
}

struct PointResult {
  std::vector<double> per_fold;
  std::vector<double> epsilons;
  int failed = 0;
  std::vector<std::string> diagnostics;
};

inline PointResult evaluate_point(const std::vector<FoldData>& folds, Method method, const GridPoint& gp,
                                  const CvOptions& opts) {
  PointResult r;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    try {
      double eps = 0.0;
      r.per_fold.push_back(fit_and_score(folds[f].train, folds[f].test, method, gp, opts, &eps));
      if (method == Method::Clda) r.epsilons.push_back(eps);
    } catch (const Error& e) {
      ++r.failed;
      r.diagnostics.push_back("fold " + std::to_string(f) + ": " + e.what());
    }
  }
  return r;
}

inline double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace detail

/// k-fold CV over a parameter grid; returns the report of the grid point with
/// the best mean accuracy (first in grid order on ties).
inline EvalReport kfold_cv(const Dataset& data, const CvOptions& opts) {
  const std::vector<GridPoint> grid =
      opts.grid.empty() ? default_grid(opts.method, data.num_features(), data.num_classes()) : opts.grid;
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "parameter grid is empty");

  bool stratified = true;
  const std::vector<detail::FoldData> folds = detail::build_folds(data, opts, stratified);

  std::vector<detail::PointResult> results(grid.size());
  const int workers = std::clamp(opts.threads, 1, static_cast<int>(grid.size()));
  if (workers == 1) {
    for (std::size_t g = 0; g < grid.size(); ++g) results[g] = detail::evaluate_point(folds, opts.method, grid[g], opts);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t g = static_cast<std::size_t>(w); g < grid.size(); g += static_cast<std::size_t>(workers))
          results[g] = detail::evaluate_point(folds, opts.method, grid[g], opts);
      });
    }
  }

  EvalReport report;
  report.stratified = stratified;
  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto& r = results[g];
    if (r.per_fold.empty()) {
      report.grid_accuracy.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double acc = detail::mean(r.per_fold);
    report.grid_accuracy.push_back(acc);
    if (!best || acc > report.grid_accuracy[*best]) best = g;
  }
  if (!best) throw Error(ErrorCode::GridPointFailed, "every fold failed at every grid point");

  const auto& r = results[*best];
  report.accuracy = detail::mean(r.per_fold);
  report.per_fold = r.per_fold;
  report.std_dev = detail::sample_std(r.per_fold);
  report.chosen = grid[*best];
  report.mean_epsilon = detail::mean(r.epsilons);
  report.failed_folds = r.failed;
  report.diagnostics = r.diagnostics;
  if (!stratified) report.diagnostics.insert(report.diagnostics.begin(), "folds are not stratified: some class has fewer than k samples");
  return report;
}

}  // namespace clda
