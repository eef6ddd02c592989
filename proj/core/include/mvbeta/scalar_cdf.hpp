#pragma once

#include <functional>
#include <memory>

namespace mvbeta {

// Cumulative distribution of a density on (0, inf), tabulated once.
//
// Knots are uniform in t = x / (1 + x) on [0, 1]; the mass between knots
// comes from adaptive quadrature and the table is read back through a
// monotone (PCHIP) interpolant in t. Queries in the first and last
// intervals are integrated directly, so the density is kept alive.
class ScalarCdf {
 public:
  static constexpr int kDefaultKnots = 10000;
  static constexpr double kDefaultTolerance = 1e-10;

  explicit ScalarCdf(std::function<double(double)> density, int knots = kDefaultKnots,
                     double tolerance = kDefaultTolerance);
  ~ScalarCdf();
  ScalarCdf(ScalarCdf&&) noexcept;
  ScalarCdf& operator=(ScalarCdf&&) noexcept;

  double operator()(double x) const;
  // Integral of the density over (0, inf) as tabulated.
  double total_mass() const;

 private:
  struct Table;
  std::unique_ptr<Table> table_;
};

}  // namespace mvbeta
