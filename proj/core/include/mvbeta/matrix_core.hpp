#pragma once

// Dense order-m matrix types, factorizations and coordinate charts.
//
// Every type here is immutable after construction. Orders are small (m <= 10
// in all experiments), so everything is dense and dynamically sized.

#include <Eigen/Dense>

#include <vector>

namespace mvbeta {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative tolerance below which two consecutive latent roots are treated as
// coincident. Formulas dividing by (l_i - l_j) reject such spectra.
inline constexpr double kDegeneracyTolerance = 1e-10;

// Relative size of an imaginary eigenvalue part tolerated by general_eig_real.
inline constexpr double kImaginaryTolerance = 1e-8;

class SymmetricMatrix {
 public:
  // Symmetrizes (s + s')/2. Throws DomainError for non-square input or when
  // the raw asymmetry exceeds 1e-8 * (1 + max|s|).
  static SymmetricMatrix from_raw(const Matrix& raw);
  static SymmetricMatrix identity(int m);
  static SymmetricMatrix diagonal(const std::vector<double>& diag);

  int order() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  explicit SymmetricMatrix(Matrix entries) : entries_(std::move(entries)) {}
  Matrix entries_;
};

// Symmetric positive definite matrix with its cached lower Cholesky factor.
class PDMatrix {
 public:
  // Throws NotPositiveDefinite when a squared Cholesky pivot is below
  // 64 eps times the largest diagonal entry.
  explicit PDMatrix(SymmetricMatrix base);
  static PDMatrix from_raw(const Matrix& raw) {
    return PDMatrix(SymmetricMatrix::from_raw(raw));
  }
  static PDMatrix identity(int m) { return PDMatrix(SymmetricMatrix::identity(m)); }

  int order() const { return base_.order(); }
  const SymmetricMatrix& base() const { return base_; }
  const Matrix& entries() const { return base_.entries(); }
  const Matrix& chol() const { return chol_; }

  double log_det() const;
  Matrix inverse() const;

 private:
  SymmetricMatrix base_;
  Matrix chol_;
};

// Square matrix with no structure assumed.
class GeneralMatrix {
 public:
  // Throws DomainError if raw is not square or holds non-finite entries.
  explicit GeneralMatrix(Matrix raw);

  int order() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// Strictly decreasing positive latent roots l_1 > ... > l_m > 0.
class Spectrum {
 public:
  // Sorts descending. Throws NonPositiveRoot if any root <= 0 and
  // DegenerateSpectrum if two roots coincide exactly.
  static Spectrum from_values(std::vector<double> values);

  int size() const { return static_cast<int>(roots_.size()); }
  const std::vector<double>& roots() const { return roots_; }
  double operator[](int i) const { return roots_[static_cast<std::size_t>(i)]; }
  // Smallest consecutive difference; +inf for m = 1.
  double min_gap() const { return min_gap_; }
  double largest() const { return roots_.front(); }
  bool is_degenerate(double rel_tol = kDegeneracyTolerance) const {
    return min_gap_ < rel_tol * roots_.front();
  }
  // Throws DegenerateSpectrum when is_degenerate(rel_tol).
  void require_separated(double rel_tol = kDegeneracyTolerance) const;

 private:
  Spectrum(std::vector<double> roots, double min_gap)
      : roots_(std::move(roots)), min_gap_(min_gap) {}
  std::vector<double> roots_;
  double min_gap_;
};

struct SymEig {
  Vector values;   // descending; ties keep solver order
  Matrix vectors;  // column k pairs with values[k]; orthogonal
};

SymEig sym_eig(const SymmetricMatrix& s);

// Latent roots of a matrix expected to have a real, positive, simple spectrum.
Spectrum general_eig_real(const GeneralMatrix& g);

// Lower-triangular L with L L' = p. Throws NotPositiveDefinite.
Matrix cholesky(const SymmetricMatrix& p);

// Symmetric PD square root through the spectral decomposition.
PDMatrix pd_sqrt(const PDMatrix& p);

// Inverse symmetric PD square root.
PDMatrix pd_inv_sqrt(const PDMatrix& p);

// Half-vectorization: column-major lower triangle, length m(m+1)/2.
Vector vech(const SymmetricMatrix& s);
Vector vech(const Matrix& s);
// Inverse of vech. Throws LengthMismatch if v.size() is not triangular.
SymmetricMatrix unvech(const Vector& v);
SymmetricMatrix unvech(const Vector& v, int m);
int vech_length(int m);
int order_from_vech_length(long len);

// Full column-major vectorization and its inverse.
Vector vec(const Matrix& g);
Matrix unvec(const Vector& v, int m);

double relative_frobenius(const Matrix& approx, const Matrix& exact);

}  // namespace mvbeta
