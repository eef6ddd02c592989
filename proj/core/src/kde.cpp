#include "mvbeta/kde.hpp"

#include "mvbeta/errors.hpp"
#include "mvbeta/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>
#include <vector>

namespace mvbeta {

namespace {

// Kernel contributions below exp(-kCutoff) of the peak are dropped.
constexpr double kCutoff = 40.0;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Cumulative Poisson(1) probabilities for inversion.
const std::array<double, 16>& poisson_one_cdf() {
  static const std::array<double, 16> table = [] {
    std::array<double, 16> t{};
    double term = std::exp(-1.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      acc += term;
      t[k] = acc;
      term /= static_cast<double>(k + 1);
    }
    return t;
  }();
  return table;
}

// Poisson(1) count of sample i in replicate r; a pure function of
// (key, r, i) so every query sees the same resample.
int bootstrap_weight(std::uint64_t key, std::uint64_t r, std::uint64_t i) {
  const std::uint64_t h = mix64(key ^ mix64((r << 40) ^ i));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  const auto& cdf = poisson_one_cdf();
  int k = 0;
  while (k < static_cast<int>(cdf.size()) - 1 && u >= cdf[static_cast<std::size_t>(k)]) ++k;
  return k;
}

struct SparseKernel {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
};

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * v[lo] + w * v[hi];
}

}  // namespace

Vector silverman_bandwidth(const Matrix& samples) {
  const auto d = samples.rows();
  const auto n = samples.cols();
  if (n < 2) throw DomainError("silverman_bandwidth: need at least 2 samples");
  const double factor =
      std::pow(4.0 / ((static_cast<double>(d) + 2.0) * static_cast<double>(n)),
               1.0 / (static_cast<double>(d) + 4.0));
  Vector h(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    std::vector<double> col(samples.row(k).begin(), samples.row(k).end());
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : col) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    std::sort(col.begin(), col.end());
    const double iqr = quantile_sorted(col, 0.75) - quantile_sorted(col, 0.25);
    double scale = std::min(sd, iqr / 1.349);
    if (!(scale > 0.0)) scale = sd;
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw DomainError("silverman_bandwidth: axis " + std::to_string(k) + " has no spread");
    }
    h(k) = factor * scale;
  }
  return h;
}

std::pair<double, double> percentile_interval(std::vector<double> values, double confidence) {
  if (values.empty()) throw DomainError("percentile_interval: no values");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("percentile_interval: confidence must lie in (0, 1)");
  }
  std::sort(values.begin(), values.end());
  const double tail = 0.5 * (1.0 - confidence);
  return {quantile_sorted(values, tail), quantile_sorted(values, 1.0 - tail)};
}

KdeBatch kde_batch(const Matrix& samples, const Matrix& queries, const KdeOptions& opts) {
  const auto d = samples.rows();
  const auto n = samples.cols();
  if (d < 1 || n < 2) throw DomainError("kde: need at least 2 samples");
  if (d > kKdeMaxDimension) {
    throw DomainError("kde: dimension " + std::to_string(d) + " exceeds " +
                      std::to_string(kKdeMaxDimension));
  }
  if (queries.rows() != d) throw DomainError("kde: query dimension does not match samples");
  if (n > static_cast<Eigen::Index>(UINT32_MAX)) throw DomainError("kde: too many samples");
  if (opts.bootstrap < 1) throw DomainError("kde: bootstrap must be >= 1");

  KdeBatch out;
  out.bandwidth = silverman_bandwidth(samples);
  out.low_sample = static_cast<std::size_t>(n) < kKdeMinimumSamples;
  const Vector inv_h = out.bandwidth.cwiseInverse();
  const double log_norm =
      -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + inv_h.array().log().sum();
  const auto q = queries.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<SparseKernel> kernels(static_cast<std::size_t>(q));
  out.estimates = Vector::Zero(q);
  parallel_chunks(static_cast<std::size_t>(q), opts.threads, [&](std::size_t j) {
    const Vector qj = queries.col(static_cast<Eigen::Index>(j));
    SparseKernel& sk = kernels[j];
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double e = 0.0;
      for (Eigen::Index k = 0; k < d && e <= kCutoff; ++k) {
        const double z = (samples(k, i) - qj(k)) * inv_h(k);
        e += 0.5 * z * z;
      }
      if (e > kCutoff) continue;
      const double v = std::exp(log_norm - e);
      sk.index.push_back(static_cast<std::uint32_t>(i));
      sk.value.push_back(v);
      acc += v;
    }
    out.estimates(static_cast<Eigen::Index>(j)) = acc * inv_n;
  });

  const std::uint64_t key = mix64(opts.seed ^ stream_id(StreamDomain::kBootstrap, 0));
  out.replicates = Matrix::Zero(q, opts.bootstrap);
  parallel_chunks(static_cast<std::size_t>(opts.bootstrap), opts.threads, [&](std::size_t r) {
    for (Eigen::Index j = 0; j < q; ++j) {
      const SparseKernel& sk = kernels[static_cast<std::size_t>(j)];
      double acc = 0.0;
      for (std::size_t t = 0; t < sk.index.size(); ++t) {
        const int w = bootstrap_weight(key, r, sk.index[t]);
        if (w != 0) acc += w * sk.value[t];
      }
      out.replicates(j, static_cast<Eigen::Index>(r)) = acc * inv_n;
    }
  });
  return out;
}

KdeEstimate kde_at(const Matrix& samples, const Vector& query, const KdeOptions& opts) {
  const KdeBatch batch = kde_batch(samples, query, opts);
  KdeEstimate e;
  e.estimate = batch.estimates(0);
  std::vector<double> reps(batch.replicates.row(0).begin(), batch.replicates.row(0).end());
  std::tie(e.ci_low, e.ci_high) = percentile_interval(std::move(reps), opts.confidence);
  e.ci_low = std::min(e.ci_low, e.estimate);
  e.ci_high = std::max(e.ci_high, e.estimate);
  e.bandwidth = batch.bandwidth;
  e.low_sample = batch.low_sample;
  return e;
}

}  // namespace mvbeta
