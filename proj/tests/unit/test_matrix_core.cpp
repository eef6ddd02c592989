#include "mvbeta/errors.hpp"
#include "mvbeta/jacobian_lab.hpp"
#include "mvbeta/matrix_core.hpp"
#include "mvbeta/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mvbeta;

namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix x(2, 2);
  x << a, b, c, d;
  return x;
}

}  // namespace

TEST(SymmetricMatrix, SymmetrizesSmallNoise) {
  const SymmetricMatrix s = SymmetricMatrix::from_raw(m2(1.0, 2.0, 2.0 + 1e-13, 3.0));
  EXPECT_EQ(s(0, 1), s(1, 0));
}

TEST(SymmetricMatrix, RejectsAsymmetricInput) {
  EXPECT_THROW(SymmetricMatrix::from_raw(m2(1.0, 2.0, 3.0, 4.0)), DomainError);
  EXPECT_THROW(SymmetricMatrix::from_raw(Matrix(2, 3)), DomainError);
}

TEST(SymEig, Identity) {
  const SymEig e = sym_eig(SymmetricMatrix::identity(2));
  EXPECT_DOUBLE_EQ(e.values(0), 1.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
  EXPECT_LT((e.vectors.transpose() * e.vectors - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(SymEig, DiagonalSortedDescending) {
  const SymEig e = sym_eig(SymmetricMatrix::diagonal({1.0, 3.0}));
  EXPECT_DOUBLE_EQ(e.values(0), 3.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
}

TEST(SymEig, HandCharacteristicPolynomial) {
  // lambda^2 - 4 lambda + 3 = 0
  const SymmetricMatrix s = SymmetricMatrix::from_raw(m2(2, 1, 1, 2));
  const SymEig e = sym_eig(s);
  EXPECT_NEAR(e.values(0), 3.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
  const Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LT(relative_frobenius(rebuilt, s.entries()), 1e-10);
}

TEST(GeneralEigReal, DiagonalAndTriangular) {
  const Spectrum d = general_eig_real(GeneralMatrix(m2(2, 0, 0, 1)));
  EXPECT_DOUBLE_EQ(d[0], 2.0);
  EXPECT_DOUBLE_EQ(d[1], 1.0);
  const Spectrum t = general_eig_real(GeneralMatrix(m2(2, 1, 0, 1)));
  EXPECT_NEAR(t[0], 2.0, 1e-14);
  EXPECT_NEAR(t[1], 1.0, 1e-14);
}

TEST(GeneralEigReal, RatioWithIdentityE) {
  const PDMatrix e = PDMatrix::identity(2);
  const Matrix h = m2(2, 1, 1, 2);
  const Spectrum s = general_eig_real(GeneralMatrix(e.inverse() * h));
  EXPECT_NEAR(s[0], 3.0, 1e-14);
  EXPECT_NEAR(s[1], 1.0, 1e-14);
}

TEST(GeneralEigReal, Errors) {
  EXPECT_THROW(general_eig_real(GeneralMatrix(m2(0, -1, 1, 0))), ComplexSpectrum);
  EXPECT_THROW(general_eig_real(GeneralMatrix(m2(1, 0, 0, -1))), NonPositiveRoot);
  EXPECT_THROW(general_eig_real(GeneralMatrix(m2(1, 0, 0, 1))), DegenerateSpectrum);
}

TEST(Spectrum, OrderingAndGap) {
  const Spectrum s = Spectrum::from_values({1.0, 4.0, 2.5});
  EXPECT_EQ(s.roots(), (std::vector<double>{4.0, 2.5, 1.0}));
  EXPECT_DOUBLE_EQ(s.min_gap(), 1.5);
  EXPECT_TRUE(std::isinf(Spectrum::from_values({2.0}).min_gap()));
  EXPECT_THROW(Spectrum::from_values({1.0, 0.0}), NonPositiveRoot);
  EXPECT_THROW(Spectrum::from_values({1.0, 1.0}), DegenerateSpectrum);
  EXPECT_THROW(Spectrum::from_values({1.0, 1.0 + 1e-13}).require_separated(), DegenerateSpectrum);
}

TEST(Cholesky, Examples) {
  EXPECT_LT((cholesky(SymmetricMatrix::identity(3)) - Matrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LT((cholesky(SymmetricMatrix::diagonal({4, 9})) - m2(2, 0, 0, 3)).norm(), 1e-15);
  const Matrix expected = m2(std::sqrt(2.0), 0, 1 / std::sqrt(2.0), std::sqrt(1.5));
  EXPECT_LT((cholesky(SymmetricMatrix::from_raw(m2(2, 1, 1, 2))) - expected).norm(), 1e-14);
}

TEST(Cholesky, RejectsIndefinite) {
  EXPECT_THROW(cholesky(SymmetricMatrix::from_raw(m2(1, 2, 2, 1))), NotPositiveDefinite);
  EXPECT_THROW(PDMatrix::from_raw(m2(1, 0, 0, 0)), NotPositiveDefinite);
}

TEST(Cholesky, RecoversRandomFactor) {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 5;
    Matrix l = Matrix::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      l(j, j) = 0.5 + rng.uniform();
      for (int i = j + 1; i < m; ++i) l(i, j) = rng.normal();
    }
    const Matrix got = cholesky(SymmetricMatrix::from_raw(l * l.transpose()));
    EXPECT_LT((got - l).norm() / l.norm(), 1e-9);
  }
}

TEST(PDMatrix, CachedFactorReconstructs) {
  RngStream rng(12, 0);
  const PDMatrix p = random_pd(4, rng);
  EXPECT_LT(relative_frobenius(p.chol() * p.chol().transpose(), p.entries()), 1e-10);
  EXPECT_TRUE((p.chol().diagonal().array() > 0).all());
  EXPECT_NEAR(p.log_det(), std::log(p.entries().determinant()), 1e-12);
}

TEST(PdSqrt, Examples) {
  EXPECT_LT((pd_sqrt(PDMatrix::identity(2)).entries() - Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT((pd_sqrt(PDMatrix::from_raw(m2(4, 0, 0, 9))).entries() - m2(2, 0, 0, 3)).norm(),
            1e-14);
  const PDMatrix r = pd_sqrt(PDMatrix::from_raw(m2(2, 1, 1, 2)));
  const SymEig e = sym_eig(r.base());
  EXPECT_NEAR(e.values(0), std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
  // Eigenvector of the input for root 3 is (1, 1)/sqrt 2.
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), std::sqrt(0.5), 1e-12);
}

TEST(PdSqrt, SquaresBackOnRandomInputs) {
  RngStream rng(13, 0);
  for (int m : {1, 2, 3, 5}) {
    for (int t = 0; t < 25; ++t) {
      const PDMatrix p = random_pd(m, rng);
      const Matrix r = pd_sqrt(p).entries();
      EXPECT_LT(relative_frobenius(r * r, p.entries()), 1e-9);
      const Matrix ri = pd_inv_sqrt(p).entries();
      EXPECT_LT(relative_frobenius(ri * p.entries() * ri, Matrix::Identity(m, m)), 1e-9);
    }
  }
}

TEST(SymVsGeneral, SpectraAgreeOnPd) {
  RngStream rng(14, 0);
  for (int t = 0; t < 100; ++t) {
    const PDMatrix p = random_pd(3, rng, 0.05);
    const SymEig e = sym_eig(p.base());
    const Spectrum g = general_eig_real(GeneralMatrix(p.entries()));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(g[i] / e.values(i), 1.0, 1e-9);
  }
}

TEST(Vech, ChartOrdering) {
  const Vector v = vech(SymmetricMatrix::from_raw(m2(1, 2, 2, 3)));
  ASSERT_EQ(v.size(), 3);
  EXPECT_EQ(v(0), 1.0);
  EXPECT_EQ(v(1), 2.0);
  EXPECT_EQ(v(2), 3.0);
  EXPECT_EQ(unvech(Vector::Zero(3)).entries(), Matrix::Zero(2, 2));
  EXPECT_EQ(vech(SymmetricMatrix::identity(3)).size(), 6);
  EXPECT_EQ(vech_length(4), 10);
  EXPECT_EQ(order_from_vech_length(10), 4);
}

TEST(Vech, RoundTripIsExact) {
  RngStream rng(15, 0);
  for (int m = 1; m <= 5; ++m) {
    Vector v(vech_length(m));
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.normal();
    EXPECT_EQ(vech(unvech(v)), v);
  }
}

TEST(Vech, LengthMismatch) {
  EXPECT_THROW(unvech(Vector::Zero(4)), LengthMismatch);
  EXPECT_THROW(unvech(Vector::Zero(3), 3), LengthMismatch);
  EXPECT_THROW(unvec(Vector::Zero(5), 2), LengthMismatch);
}

TEST(Vec, ColumnMajor) {
  const Vector v = vec(m2(1, 2, 3, 4));
  EXPECT_EQ(v(1), 3.0);
  EXPECT_EQ(v(2), 2.0);
  EXPECT_EQ(unvec(v, 2), m2(1, 2, 3, 4));
}
