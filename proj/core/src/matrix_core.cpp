#include "mvbeta/matrix_core.hpp"

#include "mvbeta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>

namespace mvbeta {

namespace {

constexpr double kRawAsymmetryTolerance = 1e-8;

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError(std::string(what) + ": expected a non-empty square matrix, got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

SymmetricMatrix SymmetricMatrix::from_raw(const Matrix& raw) {
  require_square(raw, "SymmetricMatrix");
  if (!raw.allFinite()) throw DomainError("SymmetricMatrix: non-finite entry");
  const double scale = 1.0 + max_abs(raw);
  const double asym = max_abs(raw - raw.transpose());
  if (asym > kRawAsymmetryTolerance * scale) {
    throw DomainError("SymmetricMatrix: input is not symmetric (max |s_ij - s_ji| = " +
                      std::to_string(asym) + ")");
  }
  Matrix sym = 0.5 * (raw + raw.transpose());
  return SymmetricMatrix(std::move(sym));
}

SymmetricMatrix SymmetricMatrix::identity(int m) {
  if (m < 1) throw DomainError("SymmetricMatrix: order must be positive");
  return SymmetricMatrix(Matrix::Identity(m, m));
}

SymmetricMatrix SymmetricMatrix::diagonal(const std::vector<double>& diag) {
  if (diag.empty()) throw DomainError("SymmetricMatrix: empty diagonal");
  const auto m = static_cast<Eigen::Index>(diag.size());
  Matrix d = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) d(i, i) = diag[static_cast<std::size_t>(i)];
  return from_raw(d);
}

PDMatrix::PDMatrix(SymmetricMatrix base) : base_(std::move(base)), chol_(cholesky(base_)) {}

double PDMatrix::log_det() const {
  return 2.0 * chol_.diagonal().array().log().sum();
}

Matrix PDMatrix::inverse() const {
  const auto m = chol_.rows();
  Matrix linv = chol_.triangularView<Eigen::Lower>().solve(Matrix::Identity(m, m));
  Matrix inv = linv.transpose() * linv;
  return 0.5 * (inv + inv.transpose());
}

GeneralMatrix::GeneralMatrix(Matrix raw) : entries_(std::move(raw)) {
  require_square(entries_, "GeneralMatrix");
  if (!entries_.allFinite()) throw DomainError("GeneralMatrix: non-finite entry");
}

Spectrum Spectrum::from_values(std::vector<double> values) {
  if (values.empty()) throw DomainError("Spectrum: no roots");
  std::sort(values.begin(), values.end(), std::greater<>());
  if (!(values.back() > 0.0)) {
    throw NonPositiveRoot("Spectrum: smallest root " + std::to_string(values.back()) +
                          " is not positive");
  }
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    gap = std::min(gap, values[i] - values[i + 1]);
  }
  if (gap <= 0.0) throw DegenerateSpectrum("Spectrum: repeated latent root");
  return Spectrum(std::move(values), gap);
}

void Spectrum::require_separated(double rel_tol) const {
  if (is_degenerate(rel_tol)) {
    throw DegenerateSpectrum("Spectrum: min gap " + std::to_string(min_gap_) +
                             " below " + std::to_string(rel_tol) + " * l_1");
  }
}

SymEig sym_eig(const SymmetricMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.entries());
  if (solver.info() != Eigen::Success) {
    throw IterationFailure("sym_eig: eigensolver did not converge");
  }
  // Eigen returns ascending order; flip to descending with a stable pass so
  // that equal values keep their relative order.
  const auto m = s.order();
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  const Vector& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return ev(i) > ev(j); });
  SymEig out{Vector(m), Matrix(m, m)};
  for (int k = 0; k < m; ++k) {
    out.values(k) = ev(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Spectrum general_eig_real(const GeneralMatrix& g) {
  Eigen::EigenSolver<Matrix> solver(g.entries(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw IterationFailure("general_eig_real: eigensolver did not converge");
  }
  const auto& ev = solver.eigenvalues();
  double scale = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) scale = std::max(scale, std::abs(ev(i)));
  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i).imag()) > kImaginaryTolerance * scale) {
      throw ComplexSpectrum("general_eig_real: eigenvalue with imaginary part " +
                            std::to_string(ev(i).imag()));
    }
    roots.push_back(ev(i).real());
  }
  for (double r : roots) {
    if (!(r > 0.0)) {
      throw NonPositiveRoot("general_eig_real: non-positive root " + std::to_string(r));
    }
  }
  Spectrum s = Spectrum::from_values(std::move(roots));
  s.require_separated();
  return s;
}

Matrix cholesky(const SymmetricMatrix& p) {
  Eigen::LLT<Matrix> llt(p.entries());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: non-positive pivot");
  }
  Matrix l = llt.matrixL();
  // Pivots at roundoff level relative to the diagonal mean a singular matrix.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       p.entries().diagonal().cwiseAbs().maxCoeff();
  if ((l.diagonal().array().square() <= floor).any() || !l.allFinite()) {
    throw NotPositiveDefinite("cholesky: non-positive pivot");
  }
  return l;
}

namespace {

PDMatrix spectral_power(const PDMatrix& p, double power) {
  const SymEig eig = sym_eig(p.base());
  Vector mapped = eig.values.array().pow(power);
  Matrix r = eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
  return PDMatrix::from_raw(0.5 * (r + r.transpose()));
}

}  // namespace

PDMatrix pd_sqrt(const PDMatrix& p) { return spectral_power(p, 0.5); }

PDMatrix pd_inv_sqrt(const PDMatrix& p) { return spectral_power(p, -0.5); }

int vech_length(int m) { return m * (m + 1) / 2; }

int order_from_vech_length(long len) {
  int m = 0;
  while (vech_length(m) < len) ++m;
  if (vech_length(m) != len || m == 0) {
    throw LengthMismatch("unvech: length " + std::to_string(len) +
                         " is not m(m+1)/2 for any positive m");
  }
  return m;
}

Vector vech(const Matrix& s) {
  const auto m = s.rows();
  Vector v(vech_length(static_cast<int>(m)));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = j; i < m; ++i) v(k++) = s(i, j);
  }
  return v;
}

Vector vech(const SymmetricMatrix& s) { return vech(s.entries()); }

SymmetricMatrix unvech(const Vector& v, int m) {
  if (v.size() != vech_length(m)) {
    throw LengthMismatch("unvech: expected " + std::to_string(vech_length(m)) +
                         " coordinates, got " + std::to_string(v.size()));
  }
  Matrix s(m, m);
  Eigen::Index k = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i) {
      s(i, j) = v(k);
      s(j, i) = v(k);
      ++k;
    }
  }
  return SymmetricMatrix::from_raw(s);
}

SymmetricMatrix unvech(const Vector& v) {
  return unvech(v, order_from_vech_length(v.size()));
}

Vector vec(const Matrix& g) {
  return Eigen::Map<const Vector>(g.data(), g.size());
}

Matrix unvec(const Vector& v, int m) {
  if (v.size() != static_cast<Eigen::Index>(m) * m) {
    throw LengthMismatch("unvec: expected " + std::to_string(m * m) + " coordinates, got " +
                         std::to_string(v.size()));
  }
  return Eigen::Map<const Matrix>(v.data(), m, m);
}

double relative_frobenius(const Matrix& approx, const Matrix& exact) {
  const double denom = std::max(exact.norm(), std::numeric_limits<double>::min());
  return (approx - exact).norm() / denom;
}

}  // namespace mvbeta
