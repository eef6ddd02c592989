#pragma once

// Monte Carlo checks built on the samplers: latent-root law, the
// substitution rule for the quadratic-form construction, a kernel estimate
// of Vol[J(m)], the similarity-shape experiment and the spectral equality
// chain.

#include "mvbeta/distributions.hpp"
#include "mvbeta/goodness_of_fit.hpp"
#include "mvbeta/kde.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mvbeta {

// Fixed seeds used by the default configuration and the acceptance run.
inline constexpr std::uint64_t kSeedRootDensity = 20011;
inline constexpr std::uint64_t kSeedSubstitution = 20021;
inline constexpr std::uint64_t kSeedVol = 20031;
inline constexpr std::uint64_t kSeedShape = 20041;
inline constexpr std::uint64_t kSeedSpectra = 20051;

inline constexpr double kKsAlpha = 0.01;
inline constexpr double kChi2Alpha = 0.001;

struct RootDensityOptions {
  // Evaluate the reference density at (a, b) swapped; a misfit control.
  bool swap_exponents = false;
  BinSpec bins;
  unsigned threads = 1;
  int cdf_knots = 10000;
};

// m = 1: KS of F1 draws against the tabulated CDF of density_beta2.
// m = 2: chi-square of (l1, l2) against density_latent_roots.
McReport verify_root_density(const BetaParams& params, std::size_t n, std::uint64_t seed,
                             const RootDensityOptions& opts = {});

// Draws Y1 E^{-1} Y1' with a < m and tests it against the density at
// substitute_params(params). Substituted order must be 1 or 2.
McReport verify_substitution_rule(const BetaParams& params, std::size_t n, std::uint64_t seed,
                                  const RootDensityOptions& opts = {});

struct VolOptions {
  int k_refs = 16;
  std::size_t pilot = 4000;
  double gap_threshold = 0.2;
  double norm_percentile = 0.9;
  KdeOptions kde;
  unsigned threads = 1;
};

struct VolEstimate {
  int m = 0;
  double a = 0.0;
  double b = 0.0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> reference_points;  // vec(F1), column-major
  std::vector<double> ratios;  // per reference point
  std::vector<std::string> flags;
  std::string chart;
  std::string normalization = "unit-diagonal P";
  VolOptions options;
  double runtime_seconds = 0.0;
};

// Median over reference points of exp(density_f1_unnormalized) / KDE, with a
// bootstrap interval over the same median. m = 1 estimates in log(F1).
// Throws InsufficientRefs when fewer than 3 references survive filtering.
VolEstimate estimate_vol_jordan(const BetaParams& params, std::size_t n, std::uint64_t seed,
                                const VolOptions& opts = {});

struct ShapePair {
  double l1;
  double l2;
  double t;
};

std::vector<ShapePair> default_shape_pairs();

inline constexpr std::size_t kShapeMinimumSamples = 100000;

// KDE ratio f(F_B) / f(F_A) for F_A = diag(l1, l2), F_B = [[l1, t], [0, l2]].
// Informational verdict. m = 2 only; throws LowPower for n < kShapeMinimumSamples.
McReport f1_shape_experiment(const BetaParams& params, std::size_t n, std::uint64_t seed,
                             const std::vector<ShapePair>& pairs = default_shape_pairs(),
                             const KdeOptions& kde = {}, unsigned threads = 1);

inline constexpr double kSpectralTolerance = 1e-8;

// Max relative root discrepancy between E^{-1}H, HE^{-1}, H^{1/2}E^{-1}H^{1/2}
// and the nonzero roots of Y1 E^{-1} Y1', against E^{-1/2}HE^{-1/2}.
// Integer a and b, standard regime.
McReport spectral_equality_suite(const BetaParams& params, std::size_t n, std::uint64_t seed,
                                 unsigned threads = 1);

}  // namespace mvbeta
