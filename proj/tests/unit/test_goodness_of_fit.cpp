#include "mvbeta/errors.hpp"
#include "mvbeta/goodness_of_fit.hpp"
#include "mvbeta/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mvbeta;

namespace {

std::vector<double> uniforms(std::size_t n, std::uint64_t seed) {
  RngStream r(seed, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = r.uniform();
  return x;
}

Matrix normals(int d, std::size_t n, double sd, std::uint64_t seed) {
  RngStream r(seed, 0);
  Matrix x(d, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    for (int k = 0; k < d; ++k) x(k, i) = sd * r.normal();
  }
  return x;
}

double normal2(const Vector& x, double var) {
  return std::exp(-0.5 * x.squaredNorm() / var) / (2.0 * std::numbers::pi * var);
}

}  // namespace

TEST(KolmogorovSurvival, KnownValues) {
  // Q(1.36) ~ 0.049, Q(1.63) ~ 0.0098.
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_survival(1.63), 0.0098, 3e-4);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(KsTest, NullUniform) {
  const McReport r = ks_test(uniforms(100000, 1), [](double x) { return x; });
  EXPECT_GT(*r.p_value, 0.01);
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_GE(*r.p_value, 0.0);
  EXPECT_LE(*r.p_value, 1.0);
}

TEST(KsTest, GrossMisfit) {
  const McReport r = ks_test(uniforms(100000, 2), [](double x) { return x * x; });
  EXPECT_LT(*r.p_value, 1e-6);
  EXPECT_EQ(r.verdict, Verdict::kFail);
}

TEST(KsTest, SmallSampleFlagged) {
  const McReport r = ks_test(uniforms(10, 3), [](double x) { return x; });
  EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "low_power"), r.flags.end());
}

TEST(KsTest, CdfOutOfRange) {
  EXPECT_THROW(ks_test(uniforms(200, 4), [](double x) { return 2.0 * x; }), DomainError);
}

TEST(KsTest, Replays) {
  const auto x = uniforms(5000, 5);
  const McReport a = ks_test(x, [](double v) { return v; });
  const McReport b = ks_test(x, [](double v) { return v; });
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_EQ(*a.p_value, *b.p_value);
}

TEST(Chi2Hist, NullNormal) {
  const Matrix x = normals(2, 100000, 1.0, 6);
  const McReport r = chi2_hist_test(x, [](const Vector& v) { return normal2(v, 1.0); });
  EXPECT_GT(*r.p_value, 0.001);
  EXPECT_NEAR(r.metrics.at("dof"), r.metrics.at("cells_retained") - 1, 0.0);
}

TEST(Chi2Hist, DoubledVarianceFails) {
  const Matrix x = normals(2, 100000, 1.0, 6);
  const McReport r = chi2_hist_test(x, [](const Vector& v) { return normal2(v, 2.0); });
  EXPECT_LT(*r.p_value, 1e-6);
  EXPECT_EQ(r.verdict, Verdict::kFail);
}

TEST(Chi2Hist, IdenticalSamplesDegenerate) {
  const Matrix x = Matrix::Ones(2, 1000);
  EXPECT_THROW(chi2_hist_test(x, [](const Vector& v) { return normal2(v, 1.0); }),
               DegenerateBinning);
}

TEST(Chi2Hist, ExplicitEdges) {
  const Matrix x = normals(1, 50000, 1.0, 7);
  BinSpec spec;
  spec.edges.resize(1);
  for (int k = 0; k <= 20; ++k) spec.edges[0].push_back(-3.0 + 0.3 * k);
  const McReport r = chi2_hist_test(
      x, [](const Vector& v) { return std::exp(-0.5 * v(0) * v(0)) / std::sqrt(2 * std::numbers::pi); },
      spec);
  EXPECT_GT(*r.p_value, 0.001);
  EXPECT_NEAR(r.metrics.at("grid_mass"), 0.9973, 1e-3);
}

TEST(Chi2Hist, TooFewCells) {
  const Matrix x = normals(1, 20, 1.0, 8);
  EXPECT_THROW(chi2_hist_test(x, [](const Vector&) { return 0.4; }), DegenerateBinning);
}
