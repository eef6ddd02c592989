#pragma once

// Reference values computed without the library's own formulas: direct
// quadrature of integral definitions, importance sampling and Boost's
// incomplete beta. Test code only.

#include <cstdint>

namespace oracle {

// Gamma_m[r] = integral over m x m PD R of exp(-tr R) |R|^(r - (m+1)/2) dR,
// by nested quadrature; m = 1 or 2.
double mv_gamma_by_integral(int m, double r);

// Integral over (0, inf) of the scalar beta-prime density with
// parameters (a/2, b/2), written out directly.
double beta_prime_mass(double a, double b);

// P(X <= x) for X = chi2_a / chi2_b through the regularized incomplete beta.
double beta_prime_cdf(double a, double b, double x);

// Integral of exp(density_latent_roots) over l1 > l2 > 0, m = 2.
double latent_root_mass_m2(double a, double b);

// Integral of exp(density_beta2) over 2 x 2 PD F by importance sampling in
// the Cholesky chart F = T T'. Returns the mean weight; *stderr_out gets its
// standard error.
double beta2_mass_m2_importance(double a, double b, std::uint64_t n, std::uint64_t seed,
                                double* stderr_out);

}  // namespace oracle
