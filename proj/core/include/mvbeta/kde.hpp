#pragma once

// Product-Gaussian kernel density estimates with bootstrap intervals.
//
// Samples are stored one point per column (d x n). Queries evaluated in one
// batch share their bootstrap resamples, so ratios of estimates can be
// bootstrapped replicate by replicate.

#include "mvbeta/matrix_core.hpp"

#include <cstdint>
#include <utility>

namespace mvbeta {

inline constexpr int kKdeMaxDimension = 4;
inline constexpr std::size_t kKdeMinimumSamples = 10000;

struct KdeOptions {
  int bootstrap = 200;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct KdeEstimate {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Vector bandwidth;
  bool low_sample = false;  // n < kKdeMinimumSamples
};

struct KdeBatch {
  Vector estimates;  // one per query
  Matrix replicates;  // queries x bootstrap
  Vector bandwidth;
  bool low_sample = false;
};

// Per-axis normal-reference bandwidth (4 / ((d + 2) n))^(1/(d+4)) * scale,
// with scale = min(sd, IQR / 1.349). Throws DomainError when an axis has no
// spread.
Vector silverman_bandwidth(const Matrix& samples);

// Estimates at each column of `queries`. Bootstrap replicates reweight the
// samples with Poisson(1) counts at the full-sample bandwidth. Throws
// DomainError for d > kKdeMaxDimension, an empty sample or a dimension
// mismatch.
KdeBatch kde_batch(const Matrix& samples, const Matrix& queries, const KdeOptions& opts = {});

KdeEstimate kde_at(const Matrix& samples, const Vector& query, const KdeOptions& opts = {});

// Percentile interval of `values` at the given two-sided confidence.
std::pair<double, double> percentile_interval(std::vector<double> values, double confidence);

}  // namespace mvbeta
