#include "mvbeta/distributions.hpp"
#include "mvbeta/errors.hpp"
#include "mvbeta/goodness_of_fit.hpp"
#include "mvbeta/jacobian_lab.hpp"
#include "mvbeta/special_functions.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mvbeta;

namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix x(2, 2);
  x << a, b, c, d;
  return x;
}

// Random F1 with a well-separated real spectrum: P diag(l) P^{-1}.
GeneralMatrix random_f1(int m, RngStream& rng) {
  if (m == 1) return GeneralMatrix(Matrix::Constant(1, 1, 0.2 + 3.0 * rng.uniform()));
  const JordanFactors j = random_jordan_factors(m, rng, 0.2);
  return GeneralMatrix(j.reconstruct());
}

}  // namespace

TEST(BetaParams, Regimes) {
  EXPECT_EQ(BetaParams::make(2, 3, 5).regime, Regime::kStandard);
  EXPECT_EQ(BetaParams::make(2, 1, 5).regime, Regime::kQuadraticFormOnly);
  EXPECT_THROW(BetaParams::make(2, 3, 1.5), DomainError);
  EXPECT_THROW(BetaParams::make(0, 3, 5), DomainError);
  EXPECT_THROW(BetaParams::make(2, 0, 5), DomainError);
  EXPECT_THROW(BetaParams::standard(2, 1, 5), DomainError);
}

TEST(SubstituteParams, Mapping) {
  const BetaParams s = substitute_params(BetaParams::make(2, 1, 5));
  EXPECT_EQ(s.m, 1);
  EXPECT_EQ(s.a, 2.0);
  EXPECT_EQ(s.b, 4.0);
  EXPECT_EQ(s.regime, Regime::kSubstituted);
  const BetaParams t = substitute_params(BetaParams::make(3, 2, 6));
  EXPECT_EQ(t.m, 2);
  EXPECT_EQ(t.a, 3.0);
  EXPECT_EQ(t.b, 5.0);
  EXPECT_THROW(substitute_params(BetaParams::make(2, 3, 5)), DomainError);
}

TEST(MatrixNormal, DeterministicAndStandard) {
  RngStream a(1, 0);
  RngStream b(1, 0);
  EXPECT_EQ(sample_matrix_normal(3, 4, a), sample_matrix_normal(3, 4, b));
  RngStream r(2, 0);
  const Matrix x = sample_matrix_normal(1000, 100, r);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(Wishart, ScalarIsChiSquare) {
  RngStream r(3, 0);
  const int n = 100000;
  for (double k : {1.0, 4.5}) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_wishart(1, k, r).matrix.entries()(0, 0);
    EXPECT_NEAR(sum / n, k, 3.0 * std::sqrt(2.0 * k) / std::sqrt(double(n)));
  }
}

TEST(Wishart, MeanMatrix) {
  RngStream r(4, 0);
  Matrix acc = Matrix::Zero(2, 2);
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += sample_wishart(2, 5.0, r).matrix.entries();
  acc /= n;
  EXPECT_LT((acc - 5.0 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.15);
}

TEST(Wishart, DofBelowOrder) {
  RngStream r(5, 0);
  EXPECT_THROW(sample_wishart(2, 1.5, r), DomainError);
  try {
    sample_wishart(2, 1.0, r);
  } catch (const DomainError& e) {
    EXPECT_STREQ(e.what(), "dof must be ≥ m");
  }
}

TEST(BuildBeta2, IdentityCase) {
  const SymmetricMatrix id = SymmetricMatrix::identity(2);
  const PDMatrix e = PDMatrix::identity(2);
  EXPECT_LT((build_beta2(id, e, BetaDefinition::kWhitenedH).entries() - Matrix::Identity(2, 2))
                .norm(),
            1e-14);
  EXPECT_LT(
      (build_beta2(id, e, BetaDefinition::kWhitenedEInverse).entries() - Matrix::Identity(2, 2))
          .norm(),
      1e-14);
  const Matrix y1 = Matrix::Identity(2, 2);
  EXPECT_LT(
      (build_beta2(id, e, BetaDefinition::kQuadraticForm, y1).entries() - Matrix::Identity(2, 2))
          .norm(),
      1e-14);
}

TEST(BuildBeta2, DefinitionsOneAndTwoShareSpectrum) {
  RngStream r(6, 0);
  for (int t = 0; t < 50; ++t) {
    const Matrix y1 = sample_matrix_normal(4, 2, r);
    const Matrix y2 = sample_matrix_normal(5, 2, r);
    const SymmetricMatrix h = SymmetricMatrix::from_raw(y1.transpose() * y1);
    const PDMatrix e = PDMatrix::from_raw(y2.transpose() * y2);
    const SymEig d1 = sym_eig(build_beta2(h, e, BetaDefinition::kWhitenedH));
    const SymEig d2 = sym_eig(build_beta2(h, e, BetaDefinition::kWhitenedEInverse));
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(d1.values(i) / d2.values(i), 1.0, 1e-9);
  }
}

TEST(BuildBeta2, DefinitionThreeShapeAndMissingRaw) {
  RngStream r(7, 0);
  const Matrix y1 = sample_matrix_normal(1, 2, r);
  const Matrix y2 = sample_matrix_normal(5, 2, r);
  const SymmetricMatrix h = SymmetricMatrix::from_raw(y1.transpose() * y1);
  const PDMatrix e = PDMatrix::from_raw(y2.transpose() * y2);
  const SymmetricMatrix f = build_beta2(h, e, BetaDefinition::kQuadraticForm, y1);
  EXPECT_EQ(f.order(), 1);
  EXPECT_NEAR(f(0, 0), (y1 * e.inverse() * y1.transpose())(0, 0), 1e-12);
  EXPECT_THROW(build_beta2(h, e, BetaDefinition::kQuadraticForm), MissingRaw);
  EXPECT_THROW(build_beta2(h, e, BetaDefinition::kWhitenedH), NotPositiveDefinite);
}

TEST(SampleF1, Invariants) {
  RngStream r(8, 0);
  const BetaParams p = BetaParams::standard(3, 4, 5);
  for (int t = 0; t < 100; ++t) {
    const F1Sample s = sample_f1(p, r);
    const Matrix expect = s.source_e.inverse() * s.source_h.entries();
    EXPECT_LT(relative_frobenius(s.f1.entries(), expect), 1e-10);
    const PDMatrix ei = pd_inv_sqrt(s.source_e);
    const SymEig sym = sym_eig(
        SymmetricMatrix::from_raw(ei.entries() * s.source_h.entries() * ei.entries()));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.spectrum[i] / sym.values(i), 1.0, 1e-8);
  }
}

TEST(SampleF1, Deterministic) {
  RngStream a(9, 2);
  RngStream b(9, 2);
  const BetaParams p = BetaParams::standard(2, 4, 4);
  EXPECT_EQ(sample_f1(p, a).f1.entries(), sample_f1(p, b).f1.entries());
  EXPECT_THROW(sample_f1(BetaParams::make(2, 1, 4), a), DomainError);
}

TEST(ForEachF1, IndependentOfThreadCount) {
  const BetaParams p = BetaParams::standard(2, 4, 6);
  std::vector<double> one(10000);
  std::vector<double> many(10000);
  for_each_f1(p, one.size(), 77, 1, [&](std::size_t i, const F1Sample& s) { one[i] = s.f1(0, 1); });
  for_each_f1(p, many.size(), 77, 4,
              [&](std::size_t i, const F1Sample& s) { many[i] = s.f1(0, 1); });
  EXPECT_EQ(one, many);
}

TEST(SampleF1, ScalarRatioIsBetaPrime) {
  const BetaParams p = BetaParams::standard(1, 2, 2);
  std::vector<double> x(100000);
  for_each_f1(p, x.size(), 123, 1, [&](std::size_t i, const F1Sample& s) { x[i] = s.f1(0, 0); });
  const McReport r = ks_test(x, [](double v) { return oracle::beta_prime_cdf(2, 2, v); });
  EXPECT_GT(*r.p_value, 0.01);
}

TEST(DensityBeta2, Examples) {
  EXPECT_NEAR(density_beta2(SymmetricMatrix::diagonal({1.0}), BetaParams::standard(1, 2, 2))
                  .log_value,
              std::log(0.25), 1e-14);
  EXPECT_NEAR(
      density_beta2(SymmetricMatrix::identity(2), BetaParams::standard(2, 4, 4)).log_value,
      std::log(45.0 / (256.0 * std::numbers::pi)), 1e-13);
  EXPECT_THROW(density_beta2(SymmetricMatrix::diagonal({1.0, 0.0}), BetaParams::standard(2, 4, 4)),
               NotPositiveDefinite);
}

TEST(DensityBeta2, ScalarNormalizes) {
  for (auto [a, b] : {std::pair{2.0, 2.0}, std::pair{3.0, 7.0}, std::pair{1.0, 4.0}}) {
    const BetaParams p = BetaParams::standard(1, a, b);
    // Same law written out independently.
    EXPECT_NEAR(oracle::beta_prime_mass(a, b), 1.0, 1e-10);
    const double x = 0.7;
    const double direct = (0.5 * a - 1) * std::log(x) - 0.5 * (a + b) * std::log1p(x) -
                          (std::lgamma(0.5 * a) + std::lgamma(0.5 * b) - std::lgamma(0.5 * (a + b)));
    EXPECT_NEAR(density_beta2(SymmetricMatrix::diagonal({x}), p).log_value, direct, 1e-12);
  }
}

TEST(DensityLatentRoots, Examples) {
  const BetaParams p1 = BetaParams::standard(1, 3, 5);
  for (double x : {0.1, 1.0, 4.0}) {
    EXPECT_NEAR(density_latent_roots(Spectrum::from_values({x}), p1).log_value,
                density_beta2(SymmetricMatrix::diagonal({x}), p1).log_value, 1e-13);
  }
  EXPECT_NEAR(density_latent_roots(Spectrum::from_values({2.0, 1.0}),
                                   BetaParams::standard(2, 4, 4))
                  .log_value,
              std::log(45.0 * std::sqrt(2.0) / 1296.0), 1e-13);
  EXPECT_THROW(Spectrum::from_values({1.0, 1.0}), DegenerateSpectrum);
}

TEST(DensityLatentRoots, NormalizesByQuadrature) {
  EXPECT_NEAR(oracle::latent_root_mass_m2(4, 4), 1.0, 1e-3);
  EXPECT_NEAR(oracle::latent_root_mass_m2(6, 8), 1.0, 1e-3);
}

TEST(DensityF1, Examples) {
  const BetaParams p1 = BetaParams::standard(1, 2, 2);
  EXPECT_NEAR(density_f1_unnormalized(GeneralMatrix(Matrix::Constant(1, 1, 1.7)), p1).log_value,
              density_beta2(SymmetricMatrix::diagonal({1.7}), p1).log_value, 1e-13);
  const double expect = std::log(45.0) + 0.5 * std::log(2.0) - 4 * std::log(3.0) - 4 * std::log(2.0);
  EXPECT_NEAR(density_f1_unnormalized(GeneralMatrix(m2(2, 0, 0, 1)), BetaParams::standard(2, 4, 4))
                  .log_value,
              expect, 1e-13);
  EXPECT_THROW(density_f1_unnormalized(GeneralMatrix(m2(0, -1, 1, 0)), BetaParams::standard(2, 4, 4)),
               ComplexSpectrum);
}

TEST(ClosedForms, J1ScalarReduction) {
  const BetaParams p = BetaParams::standard(1, 3, 5);
  const double f = 0.8;
  const double expect = 0.5 * (p.a + p.b) * std::log(2.0) + std::lgamma(0.5 * (p.a + p.b)) -
                        0.5 * (p.a + p.b) * std::log1p(f) - std::log(f);
  EXPECT_NEAR(j1_closed(GeneralMatrix(Matrix::Constant(1, 1, f)), p, 1.0).log_value, expect, 1e-12);
}

TEST(ClosedForms, ReproduceF1Density) {
  RngStream rng(10, 0);
  for (int m : {1, 2}) {
    for (auto [a, b] : {std::pair{4.0, 4.0}, std::pair{3.0, 7.5}}) {
      const BetaParams p = BetaParams::standard(m, a, b);
      for (int t = 0; t < 20; ++t) {
        const GeneralMatrix f = random_f1(m, rng);
        const double vol = 0.5 + 2.0 * rng.uniform();
        const double target = density_f1_unnormalized(f, p).log_value - std::log(vol);
        EXPECT_NEAR(log_f11_prefactor(f, p) + j1_closed(f, p, vol).log_value, target, 1e-10);
        EXPECT_NEAR(log_f12_prefactor(f, p) + j2_closed(f, p, vol).log_value, target, 1e-10);
      }
    }
  }
}

TEST(ClosedForms, RejectBadVolume) {
  const BetaParams p = BetaParams::standard(1, 2, 2);
  EXPECT_THROW(j1_closed(GeneralMatrix(Matrix::Constant(1, 1, 1.0)), p, 0.0), DomainError);
}

TEST(DensityBeta2, OrderTwoImportanceSampledMass) {
  double se = 0.0;
  const double mass = oracle::beta2_mass_m2_importance(4, 4, 200000, 99, &se);
  EXPECT_NEAR(mass, 1.0, std::max(0.02, 5 * se));
}
