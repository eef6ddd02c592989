#include "mvbeta/mc_verify.hpp"

#include "mvbeta/errors.hpp"
#include "mvbeta/rng.hpp"
#include "mvbeta/scalar_cdf.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <functional>
#include <tuple>

namespace mvbeta {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void require_small_order(const BetaParams& p, const char* what) {
  if (p.m != 1 && p.m != 2) {
    throw DomainError(std::string(what) + ": requires m = 1 or 2, got m = " + std::to_string(p.m));
  }
}

void require_density_params(const BetaParams& p, const char* what) {
  if (p.regime == Regime::kQuadraticFormOnly) {
    throw DomainError(std::string(what) + ": parameters outside the standard regime (a < m)");
  }
}

void record_params(McReport& r, const BetaParams& p) {
  r.metrics["m"] = p.m;
  r.metrics["a"] = p.a;
  r.metrics["b"] = p.b;
}

double scalar_density(double x, const BetaParams& p) {
  if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
  const LogDensity ld = density_beta2(SymmetricMatrix::diagonal({x}), p);
  return ld.finite ? std::exp(ld.log_value) : 0.0;
}

double root_pair_density(const Vector& l, const BetaParams& p) {
  if (!(l(0) > l(1) && l(1) > 0.0) || !std::isfinite(l(0))) return 0.0;
  try {
    const LogDensity ld = density_latent_roots(Spectrum::from_values({l(0), l(1)}), p);
    return ld.finite ? std::exp(ld.log_value) : 0.0;
  } catch (const DegenerateSpectrum&) {
    return 0.0;
  }
}

McReport scalar_ks(std::vector<double> values, const BetaParams& density_params,
                   const RootDensityOptions& opts) {
  const ScalarCdf cdf([&density_params](double x) { return scalar_density(x, density_params); },
                      opts.cdf_knots);
  McReport r = ks_test(std::move(values), [&cdf](double x) { return cdf(x); }, kKsAlpha);
  r.metrics["cdf_total_mass"] = cdf.total_mass();
  return r;
}

McReport root_chi2(const Matrix& roots, const BetaParams& density_params,
                   const RootDensityOptions& opts) {
  return chi2_hist_test(
      roots, [&density_params](const Vector& l) { return root_pair_density(l, density_params); },
      opts.bins, kChi2Alpha);
}

BetaParams swapped(const BetaParams& p) {
  BetaParams s = p;
  std::swap(s.a, s.b);
  return s;
}

}  // namespace

McReport verify_root_density(const BetaParams& params, std::size_t n, std::uint64_t seed,
                             const RootDensityOptions& opts) {
  const auto start = Clock::now();
  require_small_order(params, "verify_root_density");
  if (params.regime != Regime::kStandard) {
    throw DomainError("verify_root_density: requires the standard regime");
  }
  if (n == 0) throw DomainError("verify_root_density: n must be positive");
  const BetaParams reference = opts.swap_exponents ? swapped(params) : params;

  McReport r;
  if (params.m == 1) {
    std::vector<double> values(n);
    for_each_f1(params, n, seed, opts.threads,
                [&values](std::size_t i, const F1Sample& s) { values[i] = s.f1(0, 0); });
    r = scalar_ks(std::move(values), reference, opts);
  } else {
    Matrix roots(2, static_cast<Eigen::Index>(n));
    for_each_f1(params, n, seed, opts.threads, [&roots](std::size_t i, const F1Sample& s) {
      roots(0, static_cast<Eigen::Index>(i)) = s.spectrum[0];
      roots(1, static_cast<Eigen::Index>(i)) = s.spectrum[1];
    });
    r = root_chi2(roots, reference, opts);
  }
  r.test_name = params.m == 1 ? "eig-density/ks" : "eig-density/chi2";
  r.seed = seed;
  record_params(r, params);
  r.metrics["swap_exponents"] = opts.swap_exponents ? 1.0 : 0.0;
  r.runtime_seconds = seconds_since(start);
  return r;
}

McReport verify_substitution_rule(const BetaParams& params, std::size_t n, std::uint64_t seed,
                                  const RootDensityOptions& opts) {
  const auto start = Clock::now();
  const BetaParams sub = substitute_params(params);
  if (sub.m != 1 && sub.m != 2) {
    throw DomainError("verify_substitution_rule: substituted order must be 1 or 2");
  }
  if (n == 0) throw DomainError("verify_substitution_rule: n must be positive");
  const BetaParams reference = opts.swap_exponents ? swapped(sub) : sub;

  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  Matrix values(sub.m, static_cast<Eigen::Index>(n));
  parallel_chunks(chunks, opts.threads, [&](std::size_t chunk) {
    RngStream rng(seed, StreamDomain::kSampling, chunk);
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t end = std::min(n, begin + kSampleChunk);
    for (std::size_t i = begin; i < end; ++i) {
      const SymmetricMatrix f = sample_beta2(params, BetaDefinition::kQuadraticForm, rng);
      values.col(static_cast<Eigen::Index>(i)) = sym_eig(f).values;
    }
  });

  McReport r;
  if (sub.m == 1) {
    r = scalar_ks(std::vector<double>(values.row(0).begin(), values.row(0).end()), reference,
                  opts);
  } else {
    r = root_chi2(values, reference, opts);
  }
  r.test_name = sub.m == 1 ? "substitution/ks" : "substitution/chi2";
  r.seed = seed;
  record_params(r, params);
  r.metrics["substituted_m"] = sub.m;
  r.metrics["substituted_a"] = sub.a;
  r.metrics["substituted_b"] = sub.b;
  r.runtime_seconds = seconds_since(start);
  return r;
}

VolEstimate estimate_vol_jordan(const BetaParams& params, std::size_t n, std::uint64_t seed,
                                const VolOptions& opts) {
  const auto start = Clock::now();
  require_small_order(params, "estimate_vol_jordan");
  require_density_params(params, "estimate_vol_jordan");
  if (n < 2) throw DomainError("estimate_vol_jordan: n must be at least 2");
  if (opts.k_refs < 3) throw DomainError("estimate_vol_jordan: k_refs must be at least 3");
  if (!(opts.norm_percentile > 0.0 && opts.norm_percentile <= 1.0)) {
    throw DomainError("estimate_vol_jordan: norm_percentile must lie in (0, 1]");
  }
  const int m = params.m;
  const int d = m * m;
  const bool log_chart = m == 1;

  VolEstimate out;
  out.m = m;
  out.a = params.a;
  out.b = params.b;
  out.n = n;
  out.seed = seed;
  out.options = opts;
  out.chart = log_chart ? "log(F1)" : "vec(F1), column-major";

  // Reference points from an independent pilot stream.
  std::vector<F1Sample> pilot;
  pilot.reserve(opts.pilot);
  {
    RngStream rng(seed, StreamDomain::kPilot, 0);
    for (std::size_t i = 0; i < opts.pilot; ++i) pilot.push_back(sample_f1(params, rng));
  }
  std::vector<double> norms;
  norms.reserve(pilot.size());
  for (const auto& s : pilot) norms.push_back(s.f1.entries().norm());
  double norm_cap = std::numeric_limits<double>::infinity();
  if (!norms.empty()) {
    std::vector<double> sorted = norms;
    std::sort(sorted.begin(), sorted.end());
    const auto idx = std::min(sorted.size() - 1, static_cast<std::size_t>(std::floor(
                                                     opts.norm_percentile *
                                                     static_cast<double>(sorted.size() - 1))));
    norm_cap = sorted[idx];
  }
  std::vector<const F1Sample*> refs;
  for (std::size_t i = 0; i < pilot.size() && static_cast<int>(refs.size()) < opts.k_refs; ++i) {
    if (!(norms[i] < norm_cap)) continue;
    if (m > 1 && !(pilot[i].spectrum.min_gap() > opts.gap_threshold)) continue;
    refs.push_back(&pilot[i]);
  }
  if (refs.size() < 3) {
    throw InsufficientRefs("estimate_vol_jordan: only " + std::to_string(refs.size()) +
                           " reference points survive filtering");
  }

  Matrix samples(d, static_cast<Eigen::Index>(n));
  for_each_f1(params, n, seed, opts.threads, [&](std::size_t i, const F1Sample& s) {
    const auto col = static_cast<Eigen::Index>(i);
    if (log_chart) {
      samples(0, col) = std::log(s.f1(0, 0));
    } else {
      samples.col(col) = vec(s.f1.entries());
    }
  });

  const auto k = static_cast<Eigen::Index>(refs.size());
  Matrix queries(d, k);
  // Unnormalized density times the chart Jacobian, so ratio = target / kde.
  Vector target(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const F1Sample& s = *refs[static_cast<std::size_t>(j)];
    const double log_u = density_f1_unnormalized(s.f1, params).log_value;
    if (log_chart) {
      const double x = s.f1(0, 0);
      queries(0, j) = std::log(x);
      target(j) = std::exp(log_u) * x;
    } else {
      queries.col(j) = vec(s.f1.entries());
      target(j) = std::exp(log_u);
    }
    out.reference_points.emplace_back(s.f1.entries().data(), s.f1.entries().data() + d);
  }

  KdeOptions kopts = opts.kde;
  kopts.seed = seed;
  kopts.threads = opts.threads;
  const KdeBatch batch = kde_batch(samples, queries, kopts);

  for (Eigen::Index j = 0; j < k; ++j) out.ratios.push_back(target(j) / batch.estimates(j));
  out.estimate = median(out.ratios);
  std::vector<double> rep_medians;
  rep_medians.reserve(static_cast<std::size_t>(batch.replicates.cols()));
  for (Eigen::Index r = 0; r < batch.replicates.cols(); ++r) {
    std::vector<double> ratios;
    for (Eigen::Index j = 0; j < k; ++j) ratios.push_back(target(j) / batch.replicates(j, r));
    rep_medians.push_back(median(std::move(ratios)));
  }
  std::tie(out.ci_low, out.ci_high) =
      percentile_interval(std::move(rep_medians), kopts.confidence);
  out.ci_low = std::min(out.ci_low, out.estimate);
  out.ci_high = std::max(out.ci_high, out.estimate);

  if (batch.low_sample) out.flags.emplace_back("low_precision");
  if (static_cast<int>(refs.size()) < opts.k_refs) out.flags.emplace_back("fewer_refs_than_requested");
  if (m > 1) out.flags.emplace_back("informational");
  out.runtime_seconds = seconds_since(start);
  return out;
}

std::vector<ShapePair> default_shape_pairs() {
  return {{2.0, 1.0, 0.0}, {2.0, 1.0, 0.5}, {1.5, 0.5, 0.25}, {1.0, 0.4, 0.2}};
}

McReport f1_shape_experiment(const BetaParams& params, std::size_t n, std::uint64_t seed,
                             const std::vector<ShapePair>& pairs, const KdeOptions& kde,
                             unsigned threads) {
  const auto start = Clock::now();
  if (params.m != 2) throw DomainError("f1_shape_experiment: requires m = 2");
  require_density_params(params, "f1_shape_experiment");
  if (n < kShapeMinimumSamples) {
    throw LowPower("f1_shape_experiment: n = " + std::to_string(n) + " is below " +
                   std::to_string(kShapeMinimumSamples) + "; ratio intervals too wide");
  }
  if (pairs.empty()) throw DomainError("f1_shape_experiment: no point pairs");

  Matrix samples(4, static_cast<Eigen::Index>(n));
  for_each_f1(params, n, seed, threads, [&samples](std::size_t i, const F1Sample& s) {
    samples.col(static_cast<Eigen::Index>(i)) = vec(s.f1.entries());
  });

  const auto np = static_cast<Eigen::Index>(pairs.size());
  Matrix queries(4, 2 * np);
  for (Eigen::Index p = 0; p < np; ++p) {
    const ShapePair& sp = pairs[static_cast<std::size_t>(p)];
    queries.col(2 * p) << sp.l1, 0.0, 0.0, sp.l2;
    queries.col(2 * p + 1) << sp.l1, 0.0, sp.t, sp.l2;
  }
  KdeOptions kopts = kde;
  kopts.seed = seed;
  kopts.threads = threads;
  const KdeBatch batch = kde_batch(samples, queries, kopts);

  McReport r;
  r.test_name = "f1-shape";
  r.n = n;
  r.seed = seed;
  r.verdict = Verdict::kInformational;
  double worst = 0.0;
  int consistent = 0;
  for (Eigen::Index p = 0; p < np; ++p) {
    const ShapePair& sp = pairs[static_cast<std::size_t>(p)];
    const double fa = batch.estimates(2 * p);
    const double fb = batch.estimates(2 * p + 1);
    const double ratio = fb / fa;
    std::vector<double> reps;
    for (Eigen::Index b = 0; b < batch.replicates.cols(); ++b) {
      reps.push_back(batch.replicates(2 * p + 1, b) / batch.replicates(2 * p, b));
    }
    auto [lo, hi] = percentile_interval(std::move(reps), kopts.confidence);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    const bool contains_one = lo <= 1.0 && 1.0 <= hi;
    consistent += contains_one ? 1 : 0;
    worst = std::max(worst, std::abs(ratio - 1.0));
    r.rows.push_back({{"l1", sp.l1},
                      {"l2", sp.l2},
                      {"t", sp.t},
                      {"density_diag", fa},
                      {"density_shear", fb},
                      {"ratio", ratio},
                      {"ci_low", lo},
                      {"ci_high", hi},
                      {"ci_contains_one", contains_one ? 1.0 : 0.0}});
  }
  r.statistic = worst;
  record_params(r, params);
  r.metrics["pairs"] = static_cast<double>(np);
  r.metrics["pairs_consistent"] = consistent;
  r.metrics["bootstrap"] = kopts.bootstrap;
  r.metrics["confidence"] = kopts.confidence;
  r.flags.emplace_back(consistent == np ? "consistent_with_similarity_invariance"
                                        : "inconsistent_with_similarity_invariance");
  if (batch.low_sample) r.flags.emplace_back("low_sample");
  r.runtime_seconds = seconds_since(start);
  return r;
}

namespace {

// Real parts of the eigenvalues, descending, and the largest |imaginary| part.
std::pair<std::vector<double>, double> real_eigenvalues(const Matrix& g) {
  Eigen::EigenSolver<Matrix> es(g, false);
  std::vector<double> re;
  double imag = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    re.push_back(es.eigenvalues()(i).real());
    imag = std::max(imag, std::abs(es.eigenvalues()(i).imag()));
  }
  std::sort(re.begin(), re.end(), std::greater<>());
  return {re, imag};
}

std::vector<double> top_sym_values(const Matrix& s, int m) {
  const SymEig e = sym_eig(SymmetricMatrix::from_raw(s));
  return {e.values.data(), e.values.data() + m};
}

double discrepancy(const std::vector<double>& x, const std::vector<double>& ref, double imag) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    worst = std::max(worst, (std::abs(x[i] - ref[i]) + imag) / std::abs(ref[i]));
  }
  return worst;
}

}  // namespace

McReport spectral_equality_suite(const BetaParams& params, std::size_t n, std::uint64_t seed,
                                 unsigned threads) {
  const auto start = Clock::now();
  if (params.regime != Regime::kStandard) {
    throw DomainError("spectral_equality_suite: requires the standard regime");
  }
  if (params.a != std::floor(params.a) || params.b != std::floor(params.b)) {
    throw DomainError("spectral_equality_suite: a and b must be integers");
  }
  if (n == 0) throw DomainError("spectral_equality_suite: n must be positive");
  const int m = params.m;
  const int a = static_cast<int>(params.a);
  const int b = static_cast<int>(params.b);
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  // Per-chunk maxima per form, merged afterwards so the result is thread-independent.
  std::vector<std::array<double, 4>> chunk_max(chunks, std::array<double, 4>{});

  parallel_chunks(chunks, threads, [&](std::size_t chunk) {
    RngStream rng(seed, StreamDomain::kSampling, chunk);
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t end = std::min(n, begin + kSampleChunk);
    auto& worst = chunk_max[chunk];
    for (std::size_t i = begin; i < end; ++i) {
      const Matrix y1 = sample_matrix_normal(a, m, rng);
      const Matrix y2 = sample_matrix_normal(b, m, rng);
      const PDMatrix h = PDMatrix::from_raw(y1.transpose() * y1);
      const PDMatrix e = PDMatrix::from_raw(y2.transpose() * y2);
      const Matrix e_inv = e.inverse();
      const Matrix e_isqrt = pd_inv_sqrt(e).entries();
      const Matrix h_sqrt = pd_sqrt(h).entries();

      const std::vector<double> ref = top_sym_values(e_isqrt * h.entries() * e_isqrt, m);
      const auto [f1, f1_imag] = real_eigenvalues(e_inv * h.entries());
      const auto [f2, f2_imag] = real_eigenvalues(h.entries() * e_inv);
      const std::vector<double> f3 = top_sym_values(h_sqrt * e_inv * h_sqrt, m);
      const std::vector<double> f4 = top_sym_values(y1 * e_inv * y1.transpose(), m);
      worst[0] = std::max(worst[0], discrepancy(f1, ref, f1_imag));
      worst[1] = std::max(worst[1], discrepancy(f2, ref, f2_imag));
      worst[2] = std::max(worst[2], discrepancy(f3, ref, 0.0));
      worst[3] = std::max(worst[3], discrepancy(f4, ref, 0.0));
    }
  });

  std::array<double, 4> worst{};
  for (const auto& c : chunk_max) {
    for (std::size_t f = 0; f < 4; ++f) worst[f] = std::max(worst[f], c[f]);
  }
  McReport r;
  r.test_name = "spectra";
  r.n = n;
  r.seed = seed;
  r.statistic = *std::max_element(worst.begin(), worst.end());
  r.verdict = r.statistic < kSpectralTolerance ? Verdict::kPass : Verdict::kFail;
  record_params(r, params);
  r.metrics["tolerance"] = kSpectralTolerance;
  r.metrics["max_rel_E_inv_H"] = worst[0];
  r.metrics["max_rel_H_E_inv"] = worst[1];
  r.metrics["max_rel_H_half_E_inv_H_half"] = worst[2];
  r.metrics["max_rel_Y1_E_inv_Y1t"] = worst[3];
  r.runtime_seconds = seconds_since(start);
  return r;
}

}  // namespace mvbeta
