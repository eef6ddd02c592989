#include "mvbeta/errors.hpp"
#include "mvbeta/kde.hpp"
#include "mvbeta/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mvbeta;

namespace {

Matrix normals(int d, std::size_t n, std::uint64_t seed) {
  RngStream r(seed, 0);
  Matrix x(d, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    for (int k = 0; k < d; ++k) x(k, i) = r.normal();
  }
  return x;
}

}  // namespace

TEST(Kde, StandardNormalAtZero) {
  const KdeEstimate e = kde_at(normals(1, 100000, 1), Vector::Zero(1));
  EXPECT_NEAR(e.estimate, 1.0 / std::sqrt(2 * std::numbers::pi), 0.02);
  EXPECT_LE(e.ci_low, e.estimate);
  EXPECT_GE(e.ci_high, e.estimate);
  EXPECT_FALSE(e.low_sample);
}

TEST(Kde, FarTail) {
  const KdeEstimate e = kde_at(normals(1, 100000, 2), Vector::Constant(1, 8.0));
  EXPECT_NEAR(e.estimate, 0.0, 1e-12);
  EXPECT_LE(e.ci_low, 0.0);
  EXPECT_GE(e.ci_high, 0.0);
}

TEST(Kde, DimensionGuard) {
  EXPECT_THROW(kde_at(normals(5, 1000, 3), Vector::Zero(5)), DomainError);
  EXPECT_THROW(kde_at(normals(2, 1000, 3), Vector::Zero(3)), DomainError);
}

TEST(Kde, SmallSampleFlagged) {
  EXPECT_TRUE(kde_at(normals(1, 1000, 4), Vector::Zero(1)).low_sample);
}

TEST(Kde, BivariateNormal) {
  const KdeEstimate e = kde_at(normals(2, 200000, 5), Vector::Zero(2));
  EXPECT_NEAR(e.estimate, 1.0 / (2 * std::numbers::pi), 0.01);
}

TEST(Kde, CiShrinksWithDoubledSample) {
  double ratio_sum = 0.0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    const Matrix big = normals(1, 100000, 100 + s);
    KdeOptions o;
    o.seed = static_cast<std::uint64_t>(s);
    const KdeEstimate half = kde_at(big.leftCols(50000), Vector::Zero(1), o);
    const KdeEstimate full = kde_at(big, Vector::Zero(1), o);
    ratio_sum += (full.ci_high - full.ci_low) / (half.ci_high - half.ci_low);
  }
  EXPECT_LT(ratio_sum / seeds, 0.85);
}

TEST(Kde, BatchSharesResamples) {
  const Matrix x = normals(1, 20000, 6);
  Matrix q(1, 2);
  q << 0.3, 0.3;
  const KdeBatch b = kde_batch(x, q);
  EXPECT_EQ(b.replicates.row(0), b.replicates.row(1));
  EXPECT_EQ(b.replicates.cols(), 200);
}

TEST(Kde, Replays) {
  const Matrix x = normals(2, 20000, 7);
  const KdeEstimate a = kde_at(x, Vector::Ones(2));
  const KdeEstimate b = kde_at(x, Vector::Ones(2));
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.ci_low, b.ci_low);
  EXPECT_EQ(a.ci_high, b.ci_high);
}

TEST(Bandwidth, NormalReference) {
  const Matrix x = normals(1, 100000, 8);
  const double h = silverman_bandwidth(x)(0);
  EXPECT_NEAR(h, 1.06 * std::pow(1e5, -0.2), 0.02 * h);
  EXPECT_THROW(silverman_bandwidth(Matrix::Ones(1, 100)), DomainError);
}

TEST(PercentileInterval, Basic) {
  std::vector<double> v;
  for (int i = 0; i <= 100; ++i) v.push_back(i);
  const auto [lo, hi] = percentile_interval(v, 0.9);
  EXPECT_DOUBLE_EQ(lo, 5.0);
  EXPECT_DOUBLE_EQ(hi, 95.0);
  EXPECT_THROW(percentile_interval({}, 0.9), DomainError);
}
