#pragma once

/**
 * @brief Seeded data generation: the two-strip artificial problem with
 * injected outliers, and Gaussian feature-noise pollution.
 *
 * Random stream: std::mt19937_64 (its output sequence is fixed by the C++
 * standard) seeded through SplitMix64. Uniform doubles take the top 53 bits
 * of a draw; normals use the Box-Muller cosine branch, one normal per two
 * uniforms. Independent sub-streams come from derive_seed(seed, tag).
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "clda/core.hpp"

namespace clda {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag * 0xD1B54A32D192ED03ULL + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), rejection-sampled.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  double normal() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  /// k distinct indices from [0, n), in draw order.
  std::vector<int> sample_indices(int n, int k) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(i) + below(static_cast<std::uint64_t>(n - i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

/// Geometry of the two-strip problem. Class 1 is a horizontal strip centered
/// at the origin, class 2 a vertical strip centered at (class2_offset, 0).
/// Each training class receives outliers_per_class points displaced from its
/// center by outlier_distance along the (1, 1) diagonal with alternating sign.
struct ArtificialSpec {
  int per_class = 120;
  double strip_half_length = 10.0;
  double strip_half_width = 0.5;
  double class2_offset = 11.0;
  double outlier_distance = 60.0;  // per-axis offset, 3x the strip length
  int outliers_per_class = 3;
};

struct TrainTest {
  Dataset train;
  Dataset test;
};

namespace detail {

/// Signed multiples of the outlier distance for k = 0..count-1. They sum to
/// zero, so the outliers leave the class mean in place: +1, -1/2, -1/2 for
/// three; +1, -1 pairs otherwise, with a trailing odd one split the same way.
inline double outlier_scale(int k, int count) {
  if (count % 2 == 0 || k < count - 3) return k % 2 == 0 ? 1.0 : -1.0;
  return k == count - 3 ? 1.0 : -0.5;
}

}  // namespace detail

inline TrainTest make_artificial(std::uint64_t seed, const ArtificialSpec& spec = {}) {
  Rng rng(derive_seed(seed, 0xA127));
  const int m = spec.per_class;
  const int half = m / 2;

  auto strip = [&](double cx, double hx, double cy, double hy) {
    Matrix pts(2, m);
    for (int j = 0; j < m; ++j) {
      pts(0, j) = rng.uniform(cx - hx, cx + hx);
      pts(1, j) = rng.uniform(cy - hy, cy + hy);
    }
    return pts;
  };
  const Matrix class1 = strip(0.0, spec.strip_half_length, 0.0, spec.strip_half_width);
  const Matrix class2 = strip(spec.class2_offset, spec.strip_half_width, 0.0, spec.strip_half_length);

  const int n_out = spec.outliers_per_class;
  const int n_train = 2 * (half + n_out);
  const int n_test = 2 * (m - half);
  Matrix train(2, n_train), test(2, n_test);
  std::vector<int> train_labels, test_labels;
  Eigen::Index tr = 0, te = 0;

  const double diag = spec.outlier_distance;
  for (int cls = 1; cls <= 2; ++cls) {
    const Matrix& pts = cls == 1 ? class1 : class2;
    std::vector<int> order(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) order[static_cast<std::size_t>(j)] = j;
    rng.shuffle(order);
    for (int j = 0; j < m; ++j) {
      const auto col = pts.col(order[static_cast<std::size_t>(j)]);
      if (j < half) {
        train.col(tr++) = col;
        train_labels.push_back(cls);
      } else {
        test.col(te++) = col;
        test_labels.push_back(cls);
      }
    }
    const double cx = cls == 1 ? 0.0 : spec.class2_offset;
    for (int k = 0; k < n_out; ++k) {
      const double scale = detail::outlier_scale(k, n_out);
      train(0, tr) = cx + scale * diag + rng.uniform(-spec.strip_half_width, spec.strip_half_width);
      train(1, tr) = scale * diag + rng.uniform(-spec.strip_half_width, spec.strip_half_width);
      ++tr;
      train_labels.push_back(cls);
    }
  }
  return {validate_dataset(std::move(train), train_labels), validate_dataset(std::move(test), test_labels)};
}

struct NoiseSpec {
  double feature_fraction = 0.3;
  double sample_fraction = 0.1;
  double variance = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(feature_fraction > 0.0 && feature_fraction <= 1.0) || !(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "noise fractions must lie in (0, 1]");
    }
    if (!(variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise variance must be positive");
  }
};

namespace detail {

/// ceil(fraction * total), tolerant of products like 0.1 * 30 landing a hair above an integer.
inline int fraction_count(double fraction, int total) {
  const int k = static_cast<int>(std::ceil(fraction * total - 1e-9));
  return std::clamp(k, 1, total);
}

}  // namespace detail

/// Adds N(0, variance) to ceil(feature_fraction * n) random features of each of
/// ceil(sample_fraction * N) random samples; every other entry is untouched.
inline Dataset add_gaussian_noise(const Dataset& data, const NoiseSpec& spec) {
  spec.validate();
  const int n = data.num_features();
  const int big_n = data.num_samples();
  const int n_samples = detail::fraction_count(spec.sample_fraction, big_n);
  const int n_features = detail::fraction_count(spec.feature_fraction, n);
  const double sd = std::sqrt(spec.variance);

  Rng rng(derive_seed(spec.seed, 0x701CE));
  Matrix x = data.features();
  for (int sample : rng.sample_indices(big_n, n_samples)) {
    for (int feature : rng.sample_indices(n, n_features)) x(feature, sample) += sd * rng.normal();
  }
  return with_features(data, std::move(x));
}

}  // namespace clda
