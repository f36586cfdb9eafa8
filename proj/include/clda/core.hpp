#pragma once

/**
 * @brief Data model shared by every module.
 *
 * Samples are stored as matrix columns: a dataset with n features and N
 * samples is an n x N matrix. Class labels are re-indexed densely to 1..c in
 * order of first appearance; the original label text is kept alongside.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clda/error.hpp"

namespace clda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Dataset {
 public:
  const Matrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  /// Original label text for dense class index i (1-based) at position i-1.
  const std::vector<std::string>& label_names() const noexcept { return names_; }
  const std::vector<int>& class_counts() const noexcept { return counts_; }

  int num_classes() const noexcept { return static_cast<int>(names_.size()); }
  int num_features() const noexcept { return static_cast<int>(features_.rows()); }
  int num_samples() const noexcept { return static_cast<int>(features_.cols()); }

  const std::string& name_of(int label) const { return names_.at(static_cast<std::size_t>(label - 1)); }

 private:
  Dataset(Matrix features, std::vector<int> labels, std::vector<std::string> names)
      : features_(std::move(features)), labels_(std::move(labels)), names_(std::move(names)) {
    counts_.assign(names_.size(), 0);
    for (int l : labels_) ++counts_[static_cast<std::size_t>(l - 1)];
  }

  friend Dataset validate_dataset(Matrix features, std::span<const std::string> labels);

  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::string> names_;
  std::vector<int> counts_;
};

/// Checks shape and finiteness and re-indexes labels densely by first appearance.
inline Dataset validate_dataset(Matrix features, std::span<const std::string> labels) {
  if (features.cols() != static_cast<Eigen::Index>(labels.size())) {
    throw Error(ErrorCode::ShapeMismatch, "feature matrix has " + std::to_string(features.cols()) +
                                              " columns but " + std::to_string(labels.size()) + " labels were given");
  }
  if (features.cols() == 0 || features.rows() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "dataset is empty");
  }
  if (!features.allFinite()) {
    throw Error(ErrorCode::NonFinite, "feature matrix contains NaN or Inf");
  }
  std::unordered_map<std::string, int> index;
  std::vector<std::string> names;
  std::vector<int> dense;
  dense.reserve(labels.size());
  for (const auto& raw : labels) {
    auto [it, inserted] = index.try_emplace(raw, static_cast<int>(names.size()) + 1);
    if (inserted) names.push_back(raw);
    dense.push_back(it->second);
  }
  // Dense re-indexing guarantees N_i >= 1; an empty label string is still a class name.
  return Dataset(std::move(features), std::move(dense), std::move(names));
}

inline Dataset validate_dataset(Matrix features, std::span<const int> labels) {
  std::vector<std::string> text;
  text.reserve(labels.size());
  for (int l : labels) text.push_back(std::to_string(l));
  return validate_dataset(std::move(features), std::span<const std::string>(text));
}

inline Dataset validate_dataset(Matrix features, const std::vector<int>& labels) {
  return validate_dataset(std::move(features), std::span<const int>(labels));
}

inline Dataset validate_dataset(Matrix features, const std::vector<std::string>& labels) {
  return validate_dataset(std::move(features), std::span<const std::string>(labels));
}

/// Dataset restricted to the given sample columns (in the given order).
/// Labels are re-indexed over the subset; original names are preserved.
inline Dataset subset(const Dataset& data, std::span<const int> columns) {
  Matrix x(data.num_features(), static_cast<Eigen::Index>(columns.size()));
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k)) = data.features().col(columns[k]);
    names.push_back(data.name_of(data.labels()[static_cast<std::size_t>(columns[k])]));
  }
  return validate_dataset(std::move(x), std::span<const std::string>(names));
}

/// Same samples and labels with a replaced feature matrix of identical shape.
inline Dataset with_features(const Dataset& data, Matrix features) {
  if (features.rows() != data.num_features() || features.cols() != data.num_samples()) {
    throw Error(ErrorCode::ShapeMismatch, "replacement feature matrix has a different shape");
  }
  std::vector<std::string> names;
  names.reserve(data.labels().size());
  for (int l : data.labels()) names.push_back(data.name_of(l));
  return validate_dataset(std::move(features), std::span<const std::string>(names));
}

struct ClassStats {
  Vector global_mean;
  Matrix class_means;  // n x c, column i-1 is the mean of class i
  std::vector<int> class_counts;
};

inline ClassStats class_stats(const Dataset& data) {
  const Matrix& x = data.features();
  const int c = data.num_classes();
  ClassStats s;
  s.class_counts = data.class_counts();
  s.class_means = Matrix::Zero(x.rows(), c);
  for (Eigen::Index l = 0; l < x.cols(); ++l) {
    s.class_means.col(data.labels()[static_cast<std::size_t>(l)] - 1) += x.col(l);
  }
  for (int i = 0; i < c; ++i) s.class_means.col(i) /= static_cast<double>(s.class_counts[static_cast<std::size_t>(i)]);
  s.global_mean = x.rowwise().sum() / static_cast<double>(x.cols());
  return s;
}

/// H_b (n x c) holds sqrt(N_i) * (class mean - global mean); H_w (n x N) holds
/// class-centered samples ordered class-major, then by original sample order.
struct ScatterPair {
  Matrix h_b;
  Matrix h_w;
  std::vector<int> sample_of_column;  // original sample index of each h_w column
  std::vector<int> class_of_column;   // 1-based class of each h_w column
};

struct Projection {
  Matrix w;  // n x d
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  /// Fewer than d eigenvalues exceeded the rank tolerance at some iteration.
  bool padded = false;
  /// An update was rejected because it would have increased the objective.
  bool stalled = false;
};

struct CldaConfig {
  double epsilon = 1.0;
  int d = 1;
  int max_iter = 50;
  double tol = 1e-6;
  /// Relative ridge: the absolute shift added to the between-class scatter is ridge * tr(S) / n.
  double ridge = 1e-8;
  double zero_guard = 1e-8;

  void validate(int n) const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (d < 1 || d > n) {
      throw Error(ErrorCode::InvalidArgument, "d must be in [1, " + std::to_string(n) + "], got " + std::to_string(d));
    }
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be at least 1");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
    if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge must be non-negative");
    if (!(zero_guard > 0.0)) throw Error(ErrorCode::InvalidArgument, "zero_guard must be positive");
  }
};

}  // namespace clda
