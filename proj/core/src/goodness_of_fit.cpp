#include "mvbeta/goodness_of_fit.hpp"

#include "mvbeta/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mvbeta {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInformational:
      return "informational";
  }
  return "unknown";
}

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

McReport ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double alpha) {
  if (samples.empty()) throw DomainError("ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    if (!(f >= -1e-12 && f <= 1.0 + 1e-12)) {
      throw DomainError("ks_test: cdf returned " + std::to_string(f) + " outside [0, 1]");
    }
    f = std::clamp(f, 0.0, 1.0);
    const auto di = static_cast<double>(i);
    d = std::max({d, (di + 1.0) / n - f, f - di / n});
  }
  const double sqrt_n = std::sqrt(n);
  McReport r;
  r.test_name = "ks";
  r.n = samples.size();
  r.statistic = d;
  r.p_value = kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
  r.verdict = *r.p_value > alpha ? Verdict::kPass : Verdict::kFail;
  r.metrics["alpha"] = alpha;
  if (samples.size() < kKsMinimumSamples) r.flags.emplace_back("low_power");
  return r;
}

namespace {

std::vector<double> quantile_edges(std::vector<double> column, const BinSpec& spec) {
  std::sort(column.begin(), column.end());
  const auto last = static_cast<double>(column.size() - 1);
  std::vector<double> edges;
  for (int k = 0; k <= spec.bins_per_axis; ++k) {
    const double q = spec.lower_quantile +
                     (spec.upper_quantile - spec.lower_quantile) * k / spec.bins_per_axis;
    const double pos = q * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, column.size() - 1);
    const double w = pos - static_cast<double>(lo);
    edges.push_back((1.0 - w) * column[lo] + w * column[hi]);
  }
  return edges;
}

void require_increasing(const std::vector<double>& e) {
  if (e.size() < 2) throw DegenerateBinning("chi2_hist_test: an axis needs at least one bin");
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if (!(e[i + 1] > e[i])) {
      throw DegenerateBinning("chi2_hist_test: bin edges collapse (zero-width bin)");
    }
  }
}

}  // namespace

McReport chi2_hist_test(const Matrix& samples, const std::function<double(const Vector&)>& density,
                        const BinSpec& spec, double alpha) {
  const auto d = static_cast<int>(samples.rows());
  const auto n = static_cast<std::size_t>(samples.cols());
  if (d < 1 || n == 0) throw DomainError("chi2_hist_test: empty sample");
  if (spec.refine < 1) throw DomainError("chi2_hist_test: refine must be >= 1");

  std::vector<std::vector<double>> edges = spec.edges;
  if (edges.empty()) {
    if (spec.bins_per_axis < 1 || !(spec.lower_quantile < spec.upper_quantile)) {
      throw DomainError("chi2_hist_test: bad automatic binning parameters");
    }
    for (int k = 0; k < d; ++k) {
      std::vector<double> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = samples(k, static_cast<Eigen::Index>(i));
      edges.push_back(quantile_edges(std::move(col), spec));
    }
  }
  if (static_cast<int>(edges.size()) != d) throw LengthMismatch("chi2_hist_test: edges per axis");
  for (const auto& e : edges) require_increasing(e);

  std::vector<std::size_t> shape(static_cast<std::size_t>(d));
  std::size_t cells = 1;
  for (int k = 0; k < d; ++k) {
    shape[static_cast<std::size_t>(k)] = edges[static_cast<std::size_t>(k)].size() - 1;
    cells *= shape[static_cast<std::size_t>(k)];
  }

  // Observed counts; the last slot is the overflow cell.
  std::vector<double> observed(cells + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t flat = 0;
    bool inside = true;
    for (int k = d - 1; k >= 0 && inside; --k) {
      const auto& e = edges[static_cast<std::size_t>(k)];
      const double x = samples(k, static_cast<Eigen::Index>(i));
      if (!(x >= e.front() && x < e.back())) {
        inside = false;
        break;
      }
      const auto b = static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), x) -
                                              e.begin()) - 1;
      flat = flat * shape[static_cast<std::size_t>(k)] + b;
    }
    observed[inside ? flat : cells] += 1.0;
  }

  // Cell probabilities by the composite midpoint rule.
  std::vector<double> prob(cells + 1, 0.0);
  std::size_t sub_total = 1;
  for (int k = 0; k < d; ++k) sub_total *= static_cast<std::size_t>(spec.refine);
  Vector x(d);
  double grid_mass = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(d));
    std::size_t rem = c;
    double volume = 1.0;
    for (int k = 0; k < d; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      idx[ku] = rem % shape[ku];
      rem /= shape[ku];
      volume *= (edges[ku][idx[ku] + 1] - edges[ku][idx[ku]]) / spec.refine;
    }
    double acc = 0.0;
    for (std::size_t s = 0; s < sub_total; ++s) {
      std::size_t srem = s;
      for (int k = 0; k < d; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const auto j = srem % static_cast<std::size_t>(spec.refine);
        srem /= static_cast<std::size_t>(spec.refine);
        const double lo = edges[ku][idx[ku]];
        const double width = edges[ku][idx[ku] + 1] - lo;
        x(k) = lo + width * (static_cast<double>(j) + 0.5) / spec.refine;
      }
      const double f = density(x);
      if (std::isfinite(f) && f > 0.0) acc += f;
    }
    prob[c] = acc * volume;
    grid_mass += prob[c];
  }
  prob[cells] = std::max(0.0, 1.0 - grid_mass);

  // Pool sparse cells.
  const auto nn = static_cast<double>(n);
  std::vector<double> exp_kept;
  std::vector<double> obs_kept;
  double pooled_exp = 0.0;
  double pooled_obs = 0.0;
  for (std::size_t c = 0; c <= cells; ++c) {
    const double e = nn * prob[c];
    if (e < spec.min_expected) {
      pooled_exp += e;
      pooled_obs += observed[c];
    } else {
      exp_kept.push_back(e);
      obs_kept.push_back(observed[c]);
    }
  }
  if (pooled_exp >= spec.min_expected) {
    exp_kept.push_back(pooled_exp);
    obs_kept.push_back(pooled_obs);
  } else if (!exp_kept.empty() && (pooled_exp > 0.0 || pooled_obs > 0.0)) {
    const auto smallest = static_cast<std::size_t>(
        std::min_element(exp_kept.begin(), exp_kept.end()) - exp_kept.begin());
    exp_kept[smallest] += pooled_exp;
    obs_kept[smallest] += pooled_obs;
  }
  if (exp_kept.size() < 5) {
    throw DegenerateBinning("chi2_hist_test: only " + std::to_string(exp_kept.size()) +
                            " cells survive pooling");
  }

  double stat = 0.0;
  for (std::size_t c = 0; c < exp_kept.size(); ++c) {
    const double diff = obs_kept[c] - exp_kept[c];
    stat += diff * diff / exp_kept[c];
  }
  const double dof = static_cast<double>(exp_kept.size() - 1);

  McReport r;
  r.test_name = "chi2_hist";
  r.n = n;
  r.statistic = stat;
  r.p_value = boost::math::gamma_q(0.5 * dof, 0.5 * stat);
  r.verdict = *r.p_value > alpha ? Verdict::kPass : Verdict::kFail;
  r.metrics["alpha"] = alpha;
  r.metrics["dof"] = dof;
  r.metrics["cells_retained"] = static_cast<double>(exp_kept.size());
  r.metrics["grid_mass"] = grid_mass;
  r.metrics["refine"] = spec.refine;
  return r;
}

}  // namespace mvbeta
