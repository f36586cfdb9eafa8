#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "clda/eval.hpp"
#include "clda/linalg.hpp"
#include "clda/scatter.hpp"
#include "support.hpp"

using namespace clda;

TEST(BuildCentered, SingletonClasses) {
  Matrix x(1, 2);
  x << 0, 2;
  const Dataset d = validate_dataset(x, std::vector<int>{1, 2});
  const ScatterPair p = build_centered(d, class_stats(d));
  EXPECT_DOUBLE_EQ(p.h_b(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(p.h_b(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(p.h_w.norm(), 0.0);
}

TEST(BuildCentered, BalancedBetweenColumnsSumToZero) {
  Rng rng(51);
  const Dataset d = fixtures::random_dataset(rng, 3, 7, 4);
  const ScatterPair p = build_centered(d, class_stats(d));
  EXPECT_LT(p.h_b.rowwise().sum().norm(), 1e-12);
}

TEST(BuildCentered, ClassMajorOrdering) {
  const Dataset d = validate_dataset(Matrix::Zero(1, 4), std::vector<int>{2, 1, 2, 1});
  const ScatterPair p = build_centered(d, class_stats(d));
  EXPECT_EQ(p.sample_of_column, (std::vector<int>{0, 2, 1, 3}));
  EXPECT_EQ(p.class_of_column, (std::vector<int>{1, 1, 2, 2}));
}

TEST(Scatter, MatchesDefinitionSums) {
  Rng rng(52);
  const Dataset d = fixtures::random_dataset(rng, 4, 9, 3);
  const ScatterPair p = build_centered(d, class_stats(d));
  const Matrix& x = d.features();
  const int big_n = d.num_samples();
  Vector m = Vector::Zero(4);
  for (int l = 0; l < big_n; ++l) m += x.col(l);
  m /= big_n;
  Matrix sb = Matrix::Zero(4, 4), sw = Matrix::Zero(4, 4);
  for (int c = 1; c <= 3; ++c) {
    Vector mc = Vector::Zero(4);
    int nc = 0;
    for (int l = 0; l < big_n; ++l)
      if (d.labels()[static_cast<std::size_t>(l)] == c) {
        mc += x.col(l);
        ++nc;
      }
    mc /= nc;
    sb += nc * (mc - m) * (mc - m).transpose();
    for (int l = 0; l < big_n; ++l)
      if (d.labels()[static_cast<std::size_t>(l)] == c) sw += (x.col(l) - mc) * (x.col(l) - mc).transpose();
  }
  sb /= big_n;
  sw /= big_n;
  EXPECT_LT((between_scatter(p) - sb).norm(), 1e-12 * std::max(1.0, sb.norm()));
  EXPECT_LT((within_scatter(p) - sw).norm(), 1e-12 * std::max(1.0, sw.norm()));
}

TEST(CldaWeights, ZeroResidualUsesGuard) {
  Matrix x(1, 3);
  x << 0, 5, 7;
  const Dataset d = validate_dataset(x, std::vector<int>{1, 2, 2});
  const ScatterPair p = build_centered(d, class_stats(d));
  const WeightDiag wd = clda_weights(Matrix::Identity(1, 1), p, 10.0, 1e-8);
  EXPECT_TRUE(wd.active_f[0]);
  EXPECT_DOUBLE_EQ(wd.f(0), 1e8);
}

TEST(CldaWeights, CapExcludes) {
  Matrix x(1, 4);
  x << -2, 2, 10, 10;
  const Dataset d = validate_dataset(x, std::vector<int>{1, 1, 2, 2});
  const ScatterPair p = build_centered(d, class_stats(d));
  const WeightDiag wd = clda_weights(Matrix::Identity(1, 1), p, 1.0, 1e-8);  // residuals are 2 = 2 eps
  EXPECT_FALSE(wd.active_f[0]);
  EXPECT_EQ(wd.f(0), 0.0);
  EXPECT_EQ(wd.f(1), 0.0);
}

TEST(CldaWeights, BoundaryIsActive) {
  Matrix x(1, 4);
  x << -2, 2, 10, 10;
  const Dataset d = validate_dataset(x, std::vector<int>{1, 1, 2, 2});
  const ScatterPair p = build_centered(d, class_stats(d));
  const WeightDiag wd = clda_weights(Matrix::Identity(1, 1), p, 2.0, 1e-8);
  EXPECT_TRUE(wd.active_f[0]);
  EXPECT_DOUBLE_EQ(wd.f(0), 0.5);
}

TEST(CldaWeights, MatchesPerSampleOracle) {
  Rng rng(53);
  const Dataset d = fixtures::random_dataset(rng, 4, 10, 3);
  const ScatterPair p = build_centered(d, class_stats(d));
  const Matrix w = fixtures::random_matrix(rng, 4, 2);
  std::vector<double> r;
  for (Eigen::Index j = 0; j < p.h_w.cols(); ++j) {
    double s = 0.0;
    for (int k = 0; k < 2; ++k) {
      double dot = 0.0;
      for (int i = 0; i < 4; ++i) dot += w(i, k) * p.h_w(i, j);
      s += dot * dot;
    }
    r.push_back(std::sqrt(s));
  }
  const double eps = quantile(r, 0.75);
  const WeightDiag wd = clda_weights(w, p, eps, 1e-8);
  for (std::size_t j = 0; j < r.size(); ++j) {
    const bool on = r[j] <= eps;
    EXPECT_EQ(wd.active_f[j], on);
    EXPECT_NEAR(wd.f(static_cast<Eigen::Index>(j)), on ? 1.0 / r[j] : 0.0, 1e-12 / std::max(r[j], 1e-3));
  }
  for (Eigen::Index i = 0; i < p.h_b.cols(); ++i) {
    const double s = (w.transpose() * p.h_b.col(i)).norm();
    EXPECT_DOUBLE_EQ(wd.g(i), s <= eps ? 1.0 / s : 0.0);
  }
}

TEST(CldaWeights, ZeroWeightIffAboveEpsilon) {
  Rng rng(54);
  const Dataset d = fixtures::random_dataset(rng, 3, 12, 2);
  const ScatterPair p = build_centered(d, class_stats(d));
  const Matrix w = fixtures::random_matrix(rng, 3, 1);
  const WeightDiag wd = clda_weights(w, p, 1.0, 1e-8);
  for (Eigen::Index j = 0; j < p.h_w.cols(); ++j) {
    EXPECT_EQ(wd.f(j) == 0.0, (w.transpose() * p.h_w.col(j)).norm() > 1.0);
    EXPECT_EQ(wd.f(j) == 0.0, !wd.active_f[static_cast<std::size_t>(j)]);
    EXPECT_GE(wd.f(j), 0.0);
  }
}

TEST(CldaWeights, IndependentOfSampleOrder) {
  Rng rng(55);
  const Dataset d = fixtures::random_dataset(rng, 3, 8, 2);
  const Matrix w = fixtures::random_matrix(rng, 3, 1);
  std::vector<int> order(static_cast<std::size_t>(d.num_samples()));
  for (int i = 0; i < d.num_samples(); ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  const Dataset e = subset(d, order);
  const ScatterPair pd = build_centered(d, class_stats(d)), pe = build_centered(e, class_stats(e));
  const WeightDiag a = clda_weights(w, pd, 1.5, 1e-8), b = clda_weights(w, pe, 1.5, 1e-8);
  std::vector<double> fa(a.f.data(), a.f.data() + a.f.size()), fb(b.f.data(), b.f.data() + b.f.size());
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  ASSERT_EQ(fa.size(), fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_NEAR(fa[i], fb[i], 1e-12 * std::max(1.0, fa[i]));
}

TEST(WeightedScatters, UnitWeightsRecoverClassicalScatters) {
  Rng rng(56);
  const Dataset d = fixtures::random_dataset(rng, 3, 6, 3);
  const ScatterPair p = build_centered(d, class_stats(d));
  WeightDiag wd;
  wd.f = Vector::Ones(p.h_w.cols());
  wd.g = Vector::Ones(p.h_b.cols());
  const WeightedScatters s = weighted_scatters(p, wd);
  const double big_n = d.num_samples();
  EXPECT_LT((s.s1 - big_n * within_scatter(p)).norm(), 1e-10);
  EXPECT_LT((s.s2 - big_n * between_scatter(p)).norm(), 1e-10);
}

TEST(WeightedScatters, ZeroWeightsGiveZero) {
  Rng rng(57);
  const Dataset d = fixtures::random_dataset(rng, 3, 6, 2);
  const ScatterPair p = build_centered(d, class_stats(d));
  WeightDiag wd;
  wd.f = Vector::Zero(p.h_w.cols());
  wd.g = Vector::Ones(p.h_b.cols());
  EXPECT_EQ(weighted_scatters(p, wd).s1.norm(), 0.0);
}

TEST(WeightedScatters, MatchesRankOneSumAndIsPsd) {
  Rng rng(58);
  const Dataset d = fixtures::random_dataset(rng, 4, 7, 3);
  const ScatterPair p = build_centered(d, class_stats(d));
  WeightDiag wd;
  wd.f.resize(p.h_w.cols());
  wd.g.resize(p.h_b.cols());
  for (Eigen::Index j = 0; j < wd.f.size(); ++j) wd.f(j) = rng.uniform();
  for (Eigen::Index j = 0; j < wd.g.size(); ++j) wd.g(j) = rng.uniform();
  Matrix s1 = Matrix::Zero(4, 4), s2 = Matrix::Zero(4, 4);
  for (Eigen::Index j = 0; j < p.h_w.cols(); ++j) s1 += wd.f(j) * p.h_w.col(j) * p.h_w.col(j).transpose();
  for (Eigen::Index j = 0; j < p.h_b.cols(); ++j) s2 += wd.g(j) * p.h_b.col(j) * p.h_b.col(j).transpose();
  const WeightedScatters s = weighted_scatters(p, wd);
  EXPECT_LT((s.s1 - s1).norm(), 1e-12 * s1.norm());
  EXPECT_LT((s.s2 - s2).norm(), 1e-12 * s2.norm());
  EXPECT_GE(sym_eig(s.s1).values(0), -1e-10 * s.s1.norm());
  EXPECT_GE(sym_eig(s.s2).values(0), -1e-10 * s.s2.norm());
  EXPECT_EQ(s.s1, s.s1.transpose());
}

TEST(WeightedScatters, TraceEqualsActiveResidualSum) {
  Rng rng(59);
  const Dataset d = fixtures::random_dataset(rng, 5, 10, 3);
  const ScatterPair p = build_centered(d, class_stats(d));
  const Matrix w = fixtures::random_matrix(rng, 5, 2);
  const double eps = 2.0;
  const WeightDiag wd = clda_weights(w, p, eps, 1e-8);
  const WeightedScatters s = weighted_scatters(p, wd);
  double active_sum = 0.0;
  for (Eigen::Index j = 0; j < p.h_w.cols(); ++j) {
    const double r = (w.transpose() * p.h_w.col(j)).norm();
    if (r <= eps) active_sum += r;
  }
  EXPECT_NEAR((w.transpose() * s.s1 * w).trace(), active_sum, 1e-8 * std::max(1.0, active_sum));
}

TEST(WeightedScatters, RejectsLengthMismatch) {
  Rng rng(60);
  const Dataset d = fixtures::random_dataset(rng, 2, 4, 2);
  const ScatterPair p = build_centered(d, class_stats(d));
  WeightDiag wd;
  wd.f = Vector::Ones(3);
  wd.g = Vector::Ones(2);
  EXPECT_THROW(weighted_scatters(p, wd), Error);
}
