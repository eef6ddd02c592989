#pragma once

// Finite-difference checks of exterior-form Jacobians.
//
// A ChartMap sends one coordinate chart to another; the numeric Jacobian
// determinant at a point is compared with a closed form. Charts:
//   symmetric matrices  -> vech (column-major lower triangle)
//   general matrices    -> vec  (column-major)

#include "mvbeta/matrix_core.hpp"
#include "mvbeta/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mvbeta {

struct ChartMap {
  int in_dim = 0;
  int out_dim = 0;
  std::function<Vector(const Vector&)> eval;
  std::string description;
};

inline constexpr double kDefaultFdStep = 1e-5;

// Central-difference Jacobian with per-coordinate step step * (1 + |x_k|).
// Throws NonFinite if the map returns NaN/Inf.
Matrix fd_jacobian(const ChartMap& map, const Vector& point, double step = kDefaultFdStep);

// Central differences at h and h/2 combined by one Richardson step.
Matrix fd_jacobian_richardson(const ChartMap& map, const Vector& point,
                              double step = kDefaultFdStep);

// Determinant of the Richardson-extrapolated central-difference Jacobian.
// Throws DomainError for non-square maps or step <= 0, SingularJacobian when
// |det| < 1e-300 and NonFinite when the map does.
double numeric_jacobian_det(const ChartMap& map, const Vector& point,
                            double step = kDefaultFdStep);

struct JacobianReport {
  double numeric_det = 0.0;  // signed, Richardson-extrapolated
  double analytic_det = 0.0;
  double rel_err = 0.0;  // | |numeric| - |analytic| | / max(|analytic|, 1e-300)
  std::vector<double> point;
  double step = kDefaultFdStep;
  double numeric_det_coarse = 0.0;  // plain central difference at `step`
  bool fd_disagreement = false;  // coarse and extrapolated differ by > 10x tolerance
  std::string description;
};

// Builds a report comparing |numeric| against |analytic|; signs are ignored
// throughout, matching how the closed forms are stated.
JacobianReport compare_jacobian(const ChartMap& map, const Vector& point, double analytic,
                                double tolerance, double step = kDefaultFdStep);

// Eigenvalues lambda (distinct) and the m(m-1) off-diagonal entries of a
// unit-diagonal P, column-major with the diagonal skipped; A = P diag(lambda) P^{-1}.
struct JordanFactors {
  Spectrum lambda;
  std::vector<double> p_offdiag;

  // Throws DegenerateSpectrum / NonPositiveRoot for a bad lambda and
  // LengthMismatch when p_offdiag does not hold m(m-1) values.
  static JordanFactors make(std::vector<double> lambda, std::vector<double> p_offdiag);

  int order() const { return lambda.size(); }
  Matrix p_matrix() const;
  Matrix reconstruct() const;
};

// Matrix of the linear map (off-diagonal perturbation of P) -> off-diagonal
// part of P^{-1} dP, in the p_offdiag ordering on both sides.
Matrix jordan_form_matrix(const Matrix& p);

inline constexpr double kCongruenceTolerance = 1e-8;
inline constexpr double kSquareMapTolerance = 1e-6;
inline constexpr double kJordanTolerance = 1e-5;
inline constexpr double kPolarTolerance = 1e-5;
inline constexpr double kScalarTolerance = 1e-10;
inline constexpr double kMaxJordanCondition = 1e8;

// vech(V) -> vech(C V C) against |C|^{m+1}, at `trials` random V.
std::vector<JacobianReport> verify_congruence(const PDMatrix& c, int trials, RngStream& rng,
                                              double step = kDefaultFdStep);

// vech(X) -> vech(X^2) against 2^m |X| prod_{i<j}(lambda_i + lambda_j).
JacobianReport verify_square_map(const PDMatrix& x, double step = kDefaultFdStep);

// (lambda, p_offdiag) -> vec(P Lambda P^{-1}) against
// prod_{i<j}(lambda_i - lambda_j)^2 |det M(P)|. Throws IllConditioned when
// cond(P) > kMaxJordanCondition.
JacobianReport verify_jordan(const JordanFactors& j, double step = kDefaultFdStep);

// (w11, w12, w22, phi) -> vec(G(phi) W) for m = 2 against the chained
// polar-factorization Jacobian, which collapses to lambda_1 + lambda_2.
JacobianReport verify_polar_m2(const PDMatrix& w, double phi, double step = kDefaultFdStep);

// vech(X) -> vech(X C) with C = c I, against |C|^m prod (lambda_i+lambda_j)/(theta_i+theta_j)
// evaluated from the eigenvalues of X and XC, at `points` random X.
std::vector<JacobianReport> verify_scalar_reductions(int m, double c, RngStream& rng,
                                                     int points = 3,
                                                     double step = kDefaultFdStep);

// Random matrices for sweeps.
Matrix random_orthogonal(int m, RngStream& rng);
// Eigenvalues uniform on [0.5, 3.0] with consecutive gaps >= min_gap.
PDMatrix random_pd(int m, RngStream& rng, double min_gap = 0.0);
// lambda uniform on [0.5, 4.0] with gaps >= min_gap, P off-diagonals uniform
// on [-0.8, 0.8], redrawn until cond(P) <= max_condition.
JordanFactors random_jordan_factors(int m, RngStream& rng, double min_gap = 0.1,
                                    double max_condition = 1e3);

enum class JacobianCheck { kCongruence, kSquare, kJordan, kPolar, kScalar };

std::string to_string(JacobianCheck which);
// Throws DomainError for unknown names.
JacobianCheck jacobian_check_from_string(const std::string& name);
double default_tolerance(JacobianCheck which);

struct SweepConfig {
  double step = kDefaultFdStep;
  double min_gap = 0.1;  // spectral gap floor for random points
  double tolerance = 0.0;  // 0 selects default_tolerance(which)
  unsigned threads = 1;
};

struct JacobianSweep {
  JacobianCheck which = JacobianCheck::kCongruence;
  int m = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  int fd_disagreements = 0;
  std::vector<JacobianReport> failures;  // trials with rel_err > tolerance
  SweepConfig config;

  bool passed() const { return failures.empty(); }
};

// Trial t draws its point from RngStream(seed, kTestPoints, t).
JacobianSweep run_jacobian_sweep(JacobianCheck which, int m, int trials, std::uint64_t seed,
                                 SweepConfig config = {});

}  // namespace mvbeta
