#pragma once

// Monte Carlo verdict record and the two goodness-of-fit tests behind it:
// one-sample Kolmogorov-Smirnov for scalars and a Pearson chi-square on a
// rectangular histogram for low-dimensional points.

#include "mvbeta/matrix_core.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mvbeta {

enum class Verdict { kPass, kFail, kInformational };

std::string to_string(Verdict v);

struct McReport {
  std::string test_name;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double statistic = 0.0;
  std::optional<double> p_value;
  std::optional<std::pair<double, double>> ci;
  Verdict verdict = Verdict::kInformational;
  double runtime_seconds = 0.0;
  std::vector<std::string> flags;
  std::map<std::string, double> metrics;
  std::vector<std::map<std::string, double>> rows;
};

// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

inline constexpr std::size_t kKsMinimumSamples = 100;

// Statistic sup|F_n - F| with an asymptotic p-value (Stephens' small-n
// correction). n < kKsMinimumSamples is accepted but flagged "low_power".
// Throws DomainError when cdf leaves [0, 1].
McReport ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double alpha = 0.01);

struct BinSpec {
  // Explicit per-axis edges (strictly increasing). Empty: derive from the
  // samples' marginal quantiles.
  std::vector<std::vector<double>> edges;
  int bins_per_axis = 10;
  double lower_quantile = 0.01;
  double upper_quantile = 0.99;
  // Midpoint rule with refine^d sub-cells per bin.
  int refine = 16;
  double min_expected = 5.0;
};

// Pearson chi-square of the points (columns of `samples`, d x n) against the
// cell probabilities of `density`. Everything outside the grid forms one
// overflow cell with probability 1 - (grid mass). Cells with expectation
// below min_expected are pooled. Throws DegenerateBinning if the edges
// collapse or fewer than 5 cells survive pooling.
McReport chi2_hist_test(const Matrix& samples, const std::function<double(const Vector&)>& density,
                        const BinSpec& bins = {}, double alpha = 0.001);

}  // namespace mvbeta
