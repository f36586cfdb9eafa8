#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "clda/norms.hpp"
#include "clda/synth.hpp"
#include "support.hpp"

using namespace clda;

namespace {

Matrix three_four_zero() {
  Matrix m(2, 2);
  m << 3, 0, 4, 0;
  return m;
}

// Literal evaluation of the definition, one column at a time with explicit loops.
double capped_oracle(const Matrix& m, double p, double q, double eps) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) acc += std::pow(std::abs(m(i, j)), p);
    const double colnorm = std::pow(acc, 1.0 / p);
    const double powered = std::pow(colnorm, q);
    total += powered < eps ? powered : eps;
  }
  return std::pow(total, 1.0 / q);
}

}  // namespace

TEST(CappedNorm, CapInactive) { EXPECT_DOUBLE_EQ(capped_lpq(three_four_zero(), {2, 1, 10}), 5.0); }

TEST(CappedNorm, CapActive) { EXPECT_DOUBLE_EQ(capped_lpq(three_four_zero(), {2, 1, 2}), 2.0); }

TEST(CappedNorm, MatchesDefinitionAtMedianCap) {
  Rng rng(21);
  const Matrix m = fixtures::random_matrix(rng, 4, 6);
  std::vector<double> norms;
  for (Eigen::Index j = 0; j < 6; ++j) norms.push_back(m.col(j).norm());
  std::sort(norms.begin(), norms.end());
  const double eps = 0.5 * (norms[2] + norms[3]);
  EXPECT_NEAR(capped_lpq(m, {2, 1, eps}), capped_oracle(m, 2, 1, eps), 1e-12);
}

TEST(CappedNorm, MatchesDefinitionForOtherPQ) {
  Rng rng(22);
  for (double p : {1.0, 1.5, 2.0, 3.0})
    for (double q : {1.0, 2.0}) {
      const Matrix m = fixtures::random_matrix(rng, 3, 5);
      EXPECT_NEAR(capped_lpq(m, {p, q, 1.3}), capped_oracle(m, p, q, 1.3), 1e-12);
    }
}

TEST(CappedNorm, RejectsNonFinite) {
  Matrix m = three_four_zero();
  m(0, 1) = std::nan("");
  try {
    capped_lpq(m, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
  EXPECT_THROW(l21_norm(m), Error);
}

TEST(CappedNorm, RejectsBadParameters) {
  EXPECT_THROW(capped_lpq(three_four_zero(), {0, 1, 1}), Error);
  EXPECT_THROW(capped_lpq(three_four_zero(), {2, 1, 0}), Error);
}

TEST(L21Norm, Examples) {
  EXPECT_DOUBLE_EQ(l21_norm(three_four_zero()), 5.0);
  EXPECT_DOUBLE_EQ(l21_norm(Matrix::Zero(3, 4)), 0.0);
}

TEST(L21Norm, EqualsCappedWithInactiveCap) {
  Rng rng(23);
  const Matrix m = fixtures::random_matrix(rng, 5, 7);
  const double big = m.colwise().norm().maxCoeff();
  EXPECT_NEAR(l21_norm(m), capped_lpq(m, {2, 1, big}), 1e-12);
}

TEST(CappedNormProperty, TriangleInequality) {
  Rng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const double p = trial % 2 ? 1.0 : 2.0, q = (trial / 2) % 2 ? 1.0 : 2.0;
    const Matrix a = fixtures::random_matrix(rng, 3, 4), b = fixtures::random_matrix(rng, 3, 4);
    const CappedNormParams par{p, q, rng.uniform(0.1, 5.0)};
    EXPECT_LE(capped_lpq(a + b, par), capped_lpq(a, par) + capped_lpq(b, par) + 1e-12);
  }
}

TEST(CappedNormProperty, MonotoneInEpsilon) {
  Rng rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = fixtures::random_matrix(rng, 3, 5);
    const double e1 = rng.uniform(0.01, 3.0), e2 = e1 + rng.uniform(0.0, 3.0);
    EXPECT_LE(capped_lpq(m, {2, 1, e1}), capped_lpq(m, {2, 1, e2}));
  }
}

TEST(CappedNormProperty, NotHomogeneous) {
  const Matrix m = three_four_zero();
  EXPECT_NE(capped_lpq(3.0 * m, {2, 1, 6}), 3.0 * capped_lpq(m, {2, 1, 6}));
}

TEST(CappedNormProperty, InactiveCapEqualsPlainNorm) {
  Rng rng(26);
  for (double q : {1.0, 2.0}) {
    const Matrix m = fixtures::random_matrix(rng, 4, 4);
    EXPECT_NEAR(capped_lpq(m, {2, q, 1e6}), lpq_norm(m, 2, q), 1e-12);
  }
}
