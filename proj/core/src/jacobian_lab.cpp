#include "mvbeta/jacobian_lab.hpp"

#include "mvbeta/distributions.hpp"
#include "mvbeta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mvbeta {

namespace {

Matrix unvech_raw(const Vector& v, int m) {
  Matrix s(m, m);
  Eigen::Index k = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i) {
      s(i, j) = v(k);
      s(j, i) = v(k);
      ++k;
    }
  }
  return s;
}

std::vector<std::pair<int, int>> offdiag_positions(int m) {
  std::vector<std::pair<int, int>> pos;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (i != j) pos.emplace_back(i, j);
    }
  }
  return pos;
}

double condition_number(const Matrix& p) {
  Eigen::JacobiSVD<Matrix> svd(p);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  return smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void check_map(const ChartMap& map, const Vector& point, double step) {
  if (map.in_dim != map.out_dim) {
    throw DomainError("numeric_jacobian_det: map is not square (" + std::to_string(map.in_dim) +
                      " -> " + std::to_string(map.out_dim) + ")");
  }
  if (point.size() != map.in_dim) throw LengthMismatch("numeric_jacobian_det: point dimension");
  if (!(step > 0.0)) throw DomainError("numeric_jacobian_det: step must be positive");
}

Vector eval_checked(const ChartMap& map, const Vector& x) {
  Vector y = map.eval(x);
  if (y.size() != map.out_dim) throw LengthMismatch("chart map returned wrong dimension");
  if (!y.allFinite()) throw NonFinite("chart map returned a non-finite value");
  return y;
}

double checked_det(const Matrix& jac) {
  const double det = jac.determinant();
  if (!std::isfinite(det)) throw NonFinite("Jacobian determinant is not finite");
  if (std::abs(det) < 1e-300) throw SingularJacobian("Jacobian determinant vanishes");
  return det;
}

// Distinct sorted values in [lo, hi] with consecutive gaps >= min_gap.
std::vector<double> draw_separated(int m, double lo, double hi, double min_gap, RngStream& rng) {
  for (;;) {
    std::vector<double> v(static_cast<std::size_t>(m));
    for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
    std::sort(v.begin(), v.end(), std::greater<>());
    bool ok = true;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (v[i] - v[i + 1] < std::max(min_gap, 1e-12)) ok = false;
    }
    if (ok) return v;
  }
}

}  // namespace

Matrix fd_jacobian(const ChartMap& map, const Vector& point, double step) {
  check_map(map, point, step);
  Matrix jac(map.out_dim, map.in_dim);
  for (int k = 0; k < map.in_dim; ++k) {
    double h = step * (1.0 + std::abs(point(k)));
    // Make x + h exactly representable so the divisor matches the actual offset.
    volatile double shifted = point(k) + h;
    h = shifted - point(k);
    Vector plus = point;
    Vector minus = point;
    plus(k) += h;
    minus(k) -= h;
    jac.col(k) = (eval_checked(map, plus) - eval_checked(map, minus)) / (2.0 * h);
  }
  return jac;
}

Matrix fd_jacobian_richardson(const ChartMap& map, const Vector& point, double step) {
  const Matrix coarse = fd_jacobian(map, point, step);
  const Matrix fine = fd_jacobian(map, point, 0.5 * step);
  return (4.0 * fine - coarse) / 3.0;
}

double numeric_jacobian_det(const ChartMap& map, const Vector& point, double step) {
  return checked_det(fd_jacobian_richardson(map, point, step));
}

JacobianReport compare_jacobian(const ChartMap& map, const Vector& point, double analytic,
                                double tolerance, double step) {
  JacobianReport r;
  r.numeric_det = numeric_jacobian_det(map, point, step);
  r.numeric_det_coarse = checked_det(fd_jacobian(map, point, step));
  r.analytic_det = analytic;
  const double denom = std::max(std::abs(analytic), 1e-300);
  r.rel_err = std::abs(std::abs(r.numeric_det) - std::abs(analytic)) / denom;
  r.fd_disagreement =
      std::abs(std::abs(r.numeric_det_coarse) - std::abs(r.numeric_det)) / denom >
      10.0 * tolerance;
  r.point = to_std(point);
  r.step = step;
  r.description = map.description;
  return r;
}

JordanFactors JordanFactors::make(std::vector<double> lambda, std::vector<double> p_offdiag) {
  Spectrum s = Spectrum::from_values(std::move(lambda));
  const auto m = static_cast<std::size_t>(s.size());
  if (p_offdiag.size() != m * (m - 1)) {
    throw LengthMismatch("JordanFactors: expected m(m-1) = " + std::to_string(m * (m - 1)) +
                         " off-diagonal entries");
  }
  return {std::move(s), std::move(p_offdiag)};
}

Matrix JordanFactors::p_matrix() const {
  const int m = order();
  Matrix p = Matrix::Identity(m, m);
  std::size_t k = 0;
  for (const auto& [i, j] : offdiag_positions(m)) p(i, j) = p_offdiag[k++];
  return p;
}

Matrix JordanFactors::reconstruct() const {
  const Matrix p = p_matrix();
  Vector l = Eigen::Map<const Vector>(lambda.roots().data(), order());
  return p * l.asDiagonal() * p.inverse();
}

Matrix jordan_form_matrix(const Matrix& p) {
  const int m = static_cast<int>(p.rows());
  const auto pos = offdiag_positions(m);
  const auto n = static_cast<Eigen::Index>(pos.size());
  const Eigen::PartialPivLU<Matrix> lu(p);
  Matrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Matrix dp = Matrix::Zero(m, m);
    dp(pos[static_cast<std::size_t>(c)].first, pos[static_cast<std::size_t>(c)].second) = 1.0;
    const Matrix form = lu.solve(dp);
    for (Eigen::Index r = 0; r < n; ++r) {
      out(r, c) = form(pos[static_cast<std::size_t>(r)].first,
                       pos[static_cast<std::size_t>(r)].second);
    }
  }
  return out;
}

std::vector<JacobianReport> verify_congruence(const PDMatrix& c, int trials, RngStream& rng,
                                              double step) {
  const int m = c.order();
  const Matrix cm = c.entries();
  ChartMap map{vech_length(m), vech_length(m),
               [cm, m](const Vector& v) -> Vector {
                 return vech(Matrix(cm * unvech_raw(v, m) * cm));
               },
               "vech(V) -> vech(C V C)"};
  const double analytic = std::exp((m + 1) * c.log_det());
  std::vector<JacobianReport> out;
  out.reserve(static_cast<std::size_t>(std::max(trials, 0)));
  for (int t = 0; t < trials; ++t) {
    Vector v(vech_length(m));
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.normal();
    out.push_back(compare_jacobian(map, v, analytic, kCongruenceTolerance, step));
  }
  return out;
}

JacobianReport verify_square_map(const PDMatrix& x, double step) {
  const int m = x.order();
  const SymEig eig = sym_eig(x.base());
  Spectrum::from_values({eig.values.data(), eig.values.data() + m}).require_separated();
  double analytic = std::pow(2.0, m) * std::exp(x.log_det());
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) analytic *= eig.values(i) + eig.values(j);
  }
  ChartMap map{vech_length(m), vech_length(m),
               [m](const Vector& v) -> Vector {
                 const Matrix s = unvech_raw(v, m);
                 return vech(Matrix(s * s));
               },
               "vech(X) -> vech(X^2)"};
  return compare_jacobian(map, vech(x.base()), analytic, kSquareMapTolerance, step);
}

JacobianReport verify_jordan(const JordanFactors& j, double step) {
  const int m = j.order();
  if (m < 2) throw DomainError("verify_jordan: needs m >= 2");
  j.lambda.require_separated();
  const Matrix p = j.p_matrix();
  const double cond = condition_number(p);
  if (cond > kMaxJordanCondition) {
    throw IllConditioned("verify_jordan: cond(P) = " + std::to_string(cond));
  }
  double vandermonde_sq = 1.0;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const double d = j.lambda[a] - j.lambda[b];
      vandermonde_sq *= d * d;
    }
  }
  const double analytic = vandermonde_sq * std::abs(jordan_form_matrix(p).determinant());

  const auto pos = offdiag_positions(m);
  ChartMap map{m * m, m * m,
               [m, pos](const Vector& x) -> Vector {
                 Matrix pm = Matrix::Identity(m, m);
                 for (std::size_t k = 0; k < pos.size(); ++k) {
                   pm(pos[k].first, pos[k].second) = x(m + static_cast<Eigen::Index>(k));
                 }
                 const Vector l = x.head(m);
                 return vec(Matrix(pm * l.asDiagonal() * pm.inverse()));
               },
               "(lambda, P offdiag) -> vec(P Lambda P^-1)"};
  Vector point(m * m);
  for (int i = 0; i < m; ++i) point(i) = j.lambda[i];
  for (std::size_t k = 0; k < j.p_offdiag.size(); ++k) {
    point(m + static_cast<Eigen::Index>(k)) = j.p_offdiag[k];
  }
  return compare_jacobian(map, point, analytic, kJordanTolerance, step);
}

JacobianReport verify_polar_m2(const PDMatrix& w, double phi, double step) {
  if (w.order() != 2) throw DomainError("verify_polar_m2: W must be 2x2");
  const SymEig eig = sym_eig(w.base());
  Spectrum::from_values({eig.values(0), eig.values(1)}).require_separated();
  // (dY) = 2^-m |U|^-1/2 (dU)(G'dG) with U = W^2, (dU) = 2^m |W| (l1 + l2) (dW)
  // and (G'dG) = dphi.
  const double det_w = std::exp(w.log_det());
  const double analytic =
      0.25 * (1.0 / det_w) * (4.0 * det_w * (eig.values(0) + eig.values(1)));
  ChartMap map{4, 4,
               [](const Vector& x) -> Vector {
                 Matrix wm(2, 2);
                 wm << x(0), x(1), x(1), x(2);
                 Matrix g(2, 2);
                 g << std::cos(x(3)), -std::sin(x(3)), std::sin(x(3)), std::cos(x(3));
                 return vec(Matrix(g * wm));
               },
               "(w11, w12, w22, phi) -> vec(G(phi) W)"};
  Vector point(4);
  point << w.entries()(0, 0), w.entries()(1, 0), w.entries()(1, 1), phi;
  return compare_jacobian(map, point, analytic, kPolarTolerance, step);
}

std::vector<JacobianReport> verify_scalar_reductions(int m, double c, RngStream& rng, int points,
                                                     double step) {
  if (m < 1) throw DomainError("verify_scalar_reductions: m must be positive");
  if (!(c > 0.0)) throw DomainError("verify_scalar_reductions: c must be positive");
  const Matrix cm = c * Matrix::Identity(m, m);
  ChartMap map{vech_length(m), vech_length(m),
               [cm, m](const Vector& v) -> Vector {
                 return vech(Matrix(unvech_raw(v, m) * cm));
               },
               "vech(X) -> vech(X C), C = c I"};
  std::vector<JacobianReport> out;
  for (int t = 0; t < points; ++t) {
    const PDMatrix x = random_pd(m, rng, 0.0);
    const SymEig lam = sym_eig(x.base());
    Eigen::EigenSolver<Matrix> es(x.entries() * cm, false);
    std::vector<double> theta(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) theta[static_cast<std::size_t>(i)] = es.eigenvalues()(i).real();
    std::sort(theta.begin(), theta.end(), std::greater<>());
    double analytic = std::pow(cm.determinant(), m);
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        analytic *= (lam.values(i) + lam.values(j)) /
                    (theta[static_cast<std::size_t>(i)] + theta[static_cast<std::size_t>(j)]);
      }
    }
    out.push_back(compare_jacobian(map, vech(x.base()), analytic, kScalarTolerance, step));
  }
  return out;
}

Matrix random_orthogonal(int m, RngStream& rng) {
  const Matrix a = sample_matrix_normal(m, m, rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < m; ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  return q;
}

PDMatrix random_pd(int m, RngStream& rng, double min_gap) {
  const std::vector<double> ev = draw_separated(m, 0.5, 3.0, min_gap, rng);
  const Matrix q = random_orthogonal(m, rng);
  const Vector d = Eigen::Map<const Vector>(ev.data(), m);
  return PDMatrix::from_raw(q * d.asDiagonal() * q.transpose());
}

JordanFactors random_jordan_factors(int m, RngStream& rng, double min_gap, double max_condition) {
  for (;;) {
    std::vector<double> lambda = draw_separated(m, 0.5, 4.0, min_gap, rng);
    std::vector<double> off(static_cast<std::size_t>(m * (m - 1)));
    for (auto& x : off) x = -0.8 + 1.6 * rng.uniform();
    JordanFactors j = JordanFactors::make(std::move(lambda), std::move(off));
    if (condition_number(j.p_matrix()) <= max_condition) return j;
  }
}

std::string to_string(JacobianCheck which) {
  switch (which) {
    case JacobianCheck::kCongruence:
      return "congruence";
    case JacobianCheck::kSquare:
      return "square";
    case JacobianCheck::kJordan:
      return "jordan";
    case JacobianCheck::kPolar:
      return "polar";
    case JacobianCheck::kScalar:
      return "scalar";
  }
  return "unknown";
}

JacobianCheck jacobian_check_from_string(const std::string& name) {
  for (auto w : {JacobianCheck::kCongruence, JacobianCheck::kSquare, JacobianCheck::kJordan,
                 JacobianCheck::kPolar, JacobianCheck::kScalar}) {
    if (to_string(w) == name) return w;
  }
  throw DomainError("unknown Jacobian check '" + name + "'");
}

double default_tolerance(JacobianCheck which) {
  switch (which) {
    case JacobianCheck::kCongruence:
      return kCongruenceTolerance;
    case JacobianCheck::kSquare:
      return kSquareMapTolerance;
    case JacobianCheck::kJordan:
      return kJordanTolerance;
    case JacobianCheck::kPolar:
      return kPolarTolerance;
    case JacobianCheck::kScalar:
      return kScalarTolerance;
  }
  return 0.0;
}

JacobianSweep run_jacobian_sweep(JacobianCheck which, int m, int trials, std::uint64_t seed,
                                 SweepConfig config) {
  if (trials < 1) throw DomainError("trials must be positive");
  if (m < 1) throw DomainError("m must be positive");
  if (which == JacobianCheck::kPolar && m != 2) throw DomainError("polar check needs m = 2");
  if (which == JacobianCheck::kJordan && m < 2) throw DomainError("jordan check needs m >= 2");

  JacobianSweep sweep;
  sweep.which = which;
  sweep.m = m;
  sweep.trials = trials;
  sweep.seed = seed;
  sweep.tolerance = config.tolerance > 0.0 ? config.tolerance : default_tolerance(which);
  sweep.config = config;

  std::vector<JacobianReport> reports(static_cast<std::size_t>(trials));
  parallel_chunks(reports.size(), config.threads, [&](std::size_t t) {
    RngStream rng(seed, StreamDomain::kTestPoints, t);
    switch (which) {
      case JacobianCheck::kCongruence:
        reports[t] = verify_congruence(random_pd(m, rng), 1, rng, config.step).front();
        break;
      case JacobianCheck::kSquare:
        reports[t] = verify_square_map(random_pd(m, rng, config.min_gap), config.step);
        break;
      case JacobianCheck::kJordan:
        reports[t] = verify_jordan(random_jordan_factors(m, rng, config.min_gap), config.step);
        break;
      case JacobianCheck::kPolar: {
        const PDMatrix w = random_pd(2, rng, config.min_gap);
        reports[t] = verify_polar_m2(w, 2.0 * std::numbers::pi * rng.uniform(), config.step);
        break;
      }
      case JacobianCheck::kScalar: {
        const double c = 0.5 + 2.5 * rng.uniform();
        reports[t] = verify_scalar_reductions(m, c, rng, 1, config.step).front();
        break;
      }
    }
  });

  double sum = 0.0;
  for (const auto& r : reports) {
    sweep.max_rel_err = std::max(sweep.max_rel_err, r.rel_err);
    sum += r.rel_err;
    if (r.fd_disagreement) ++sweep.fd_disagreements;
    if (!(r.rel_err <= sweep.tolerance)) sweep.failures.push_back(r);
  }
  sweep.mean_rel_err = sum / static_cast<double>(reports.size());
  return sweep;
}

}  // namespace mvbeta
