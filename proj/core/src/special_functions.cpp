#include "mvbeta/special_functions.hpp"

#include "mvbeta/errors.hpp"

#include <cmath>
#include <numbers>

namespace mvbeta {

namespace {

void require_order(int m) {
  if (m < 1) throw DomainError("order m must be a positive integer, got " + std::to_string(m));
}

void require_regime(int m, double r, const char* name) {
  const double bound = 0.5 * (m - 1);
  if (!std::isfinite(r) || !(r > bound)) {
    throw DomainError(std::string(name) + " = " + std::to_string(r) + " violates " + name +
                      " > (m-1)/2 = " + std::to_string(bound) + " for m = " +
                      std::to_string(m));
  }
}

}  // namespace

double log_mv_gamma(int m, double r) {
  require_order(m);
  require_regime(m, r, "r");
  double acc = 0.25 * m * (m - 1) * std::log(std::numbers::pi);
  for (int i = 0; i < m; ++i) acc += std::lgamma(r - 0.5 * i);
  return acc;
}

DomainCheckedReal checked_log_mv_gamma(int m, double r) {
  return {log_mv_gamma(m, r), "r > (m-1)/2"};
}

double log_mv_beta(int m, double r, double q) {
  require_order(m);
  require_regime(m, r, "r");
  require_regime(m, q, "q");
  return log_mv_gamma(m, r) + log_mv_gamma(m, q) - log_mv_gamma(m, r + q);
}

DomainCheckedReal checked_log_mv_beta(int m, double r, double q) {
  return {log_mv_beta(m, r, q), "r > (m-1)/2, q > (m-1)/2"};
}

double log_vol_orthogonal(int m) {
  require_order(m);
  return m * std::numbers::ln2 + 0.5 * m * m * std::log(std::numbers::pi) -
         log_mv_gamma(m, 0.5 * m);
}

double vol_orthogonal(int m) { return std::exp(log_vol_orthogonal(m)); }

}  // namespace mvbeta
