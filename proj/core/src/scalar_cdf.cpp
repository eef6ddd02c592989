#include "mvbeta/scalar_cdf.hpp"

#include "mvbeta/errors.hpp"

#include <cmath>

// pchip.hpp in Boost 1.74 calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace mvbeta {

namespace {

// Density pulled back to t in (0, 1): f(x(t)) dx/dt with x = t/(1-t).
double pulled_back(const std::function<double(double)>& density, double t) {
  if (!(t > 0.0) || !(t < 1.0)) return 0.0;
  const double x = t / (1.0 - t);
  const double v = density(x) / ((1.0 - t) * (1.0 - t));
  return std::isfinite(v) ? v : 0.0;
}

}  // namespace

struct ScalarCdf::Table {
  boost::math::interpolators::pchip<std::vector<double>> interp;
  double total;
  std::function<double(double)> density;
  double tolerance;
  double first_knot;  // end of the first interval
  double last_knot;   // start of the last interval
  double mass_below_last;
};

ScalarCdf::ScalarCdf(std::function<double(double)> density, int knots, double tolerance) {
  if (knots < 4) throw DomainError("ScalarCdf: needs at least 4 knots");
  auto in_t = [&density](double t) { return pulled_back(density, t); };
  boost::math::quadrature::tanh_sinh<double> endpoint_rule;
  std::vector<double> t(static_cast<std::size_t>(knots));
  std::vector<double> cdf(static_cast<std::size_t>(knots));
  const int last = knots - 1;
  double acc = 0.0;
  t[0] = 0.0;
  cdf[0] = 0.0;
  for (int k = 1; k < knots; ++k) {
    const double lo = static_cast<double>(k - 1) / last;
    const double hi = static_cast<double>(k) / last;
    double piece;
    if (k == 1 || k == last) {
      // Endpoint intervals may carry integrable singularities.
      piece = endpoint_rule.integrate(in_t, lo, hi, tolerance);
    } else {
      piece = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(in_t, lo, hi, 10,
                                                                          tolerance);
    }
    acc += piece;
    t[static_cast<std::size_t>(k)] = hi;
    cdf[static_cast<std::size_t>(k)] = acc;
  }
  const double total = acc;
  const double first_knot = t[1];
  const double last_knot = t[static_cast<std::size_t>(last - 1)];
  const double mass_below_last = cdf[static_cast<std::size_t>(last - 1)];
  table_ = std::make_unique<Table>(
      Table{boost::math::interpolators::pchip<std::vector<double>>(std::move(t), std::move(cdf)),
            total, std::move(density), tolerance, first_knot, last_knot, mass_below_last});
}

ScalarCdf::~ScalarCdf() = default;
ScalarCdf::ScalarCdf(ScalarCdf&&) noexcept = default;
ScalarCdf& ScalarCdf::operator=(ScalarCdf&&) noexcept = default;

double ScalarCdf::operator()(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return std::min(1.0, table_->total);
  const double t = x / (1.0 + x);
  // The end intervals can hold singular or slowly decaying behaviour that a
  // cubic cannot follow, so integrate them directly.
  const Table& tb = *table_;
  auto in_t = [&tb](double u) { return pulled_back(tb.density, u); };
  double v;
  if (t < tb.first_knot) {
    v = boost::math::quadrature::tanh_sinh<double>().integrate(in_t, 0.0, t, tb.tolerance);
  } else if (t > tb.last_knot) {
    v = tb.mass_below_last +
        boost::math::quadrature::tanh_sinh<double>().integrate(in_t, tb.last_knot, t, tb.tolerance);
  } else {
    v = tb.interp(t);
  }
  return std::clamp(v, 0.0, 1.0);
}

double ScalarCdf::total_mass() const { return table_->total; }

}  // namespace mvbeta
