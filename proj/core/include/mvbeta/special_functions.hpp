#pragma once

// Multivariate gamma and beta functions and the volume of O(m).
//
// Everything is returned on the log scale; callers exponentiate at the edge.

#include <string>

namespace mvbeta {

struct DomainCheckedReal {
  double value;
  std::string constraint;  // the regime that was verified, e.g. "r > (m-1)/2"
};

// log Gamma_m[r] = m(m-1)/4 log(pi) + sum_{i=1..m} log Gamma(r - (i-1)/2).
// Requires r > (m-1)/2; throws DomainError otherwise (the boundary included).
double log_mv_gamma(int m, double r);
DomainCheckedReal checked_log_mv_gamma(int m, double r);

// log B_m[r, q] = log Gamma_m[r] + log Gamma_m[q] - log Gamma_m[r + q].
double log_mv_beta(int m, double r, double q);
DomainCheckedReal checked_log_mv_beta(int m, double r, double q);

// Vol[O(m)] = 2^m pi^(m^2/2) / Gamma_m[m/2], and its logarithm.
double log_vol_orthogonal(int m);
double vol_orthogonal(int m);

}  // namespace mvbeta
