#pragma once

// Samplers for the matrix normal, Wishart, matrix beta type II and the
// nonsymmetric ratio F1 = E^{-1} H, plus closed-form log densities.
//
// Wishart scale is always the identity. Densities are evaluated in log space.

#include "mvbeta/matrix_core.hpp"
#include "mvbeta/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace mvbeta {

enum class Regime {
  kStandard,     // a >= m, b >= m
  kQuadraticFormOnly,  // a < m, b >= m: only the quadratic-form definition applies
  kSubstituted,  // parameters already mapped by substitute_params
};

std::string to_string(Regime r);

struct BetaParams {
  int m = 1;
  double a = 1.0;
  double b = 1.0;
  Regime regime = Regime::kStandard;

  // Classifies (m, a, b) into kStandard or kQuadraticFormOnly. Throws DomainError
  // when m < 1, a <= 0 or b < m.
  static BetaParams make(int m, double a, double b);
  // Like make() but rejects anything outside the standard regime.
  static BetaParams standard(int m, double a, double b);
};

// (m, a, b) -> (a, m, b + a - m), tagged kSubstituted. Requires kQuadraticFormOnly
// with an integer a.
BetaParams substitute_params(const BetaParams& p);

struct WishartSample {
  PDMatrix matrix;
  double dof;
  bool scale_is_identity = true;
};

struct F1Sample {
  GeneralMatrix f1;
  PDMatrix source_e;
  PDMatrix source_h;
  Spectrum spectrum;
};

struct LogDensity {
  double log_value;
  bool finite;

  double linear() const;
};

// Which line of the beta type II construction to apply.
enum class BetaDefinition {
  kWhitenedH = 1,         // E^{-1/2} H E^{-1/2}
  kWhitenedEInverse = 2,  // H^{1/2} E^{-1} H^{1/2}
  kQuadraticForm = 3,     // Y1 E^{-1} Y1'
};

BetaDefinition beta_definition_from_int(int def);

// rows x cols matrix of i.i.d. standard normals.
Matrix sample_matrix_normal(int rows, int cols, RngStream& rng);

// W_m(dof, I) by the Bartlett construction. Throws DomainError if dof < m.
WishartSample sample_wishart(int m, double dof, RngStream& rng);

// y1_gram = Y1'Y1 (H) and y2_gram = Y2'Y2 (E). The quadratic form needs the raw
// a x m matrix Y1 and returns an a x a matrix; the other two need H PD.
SymmetricMatrix build_beta2(const SymmetricMatrix& y1_gram, const PDMatrix& y2_gram,
                            BetaDefinition definition,
                            const std::optional<Matrix>& y1_raw = std::nullopt);

// Draws Y1 (a x m) and Y2 (b x m) and applies build_beta2. a and b must be
// integers; definitions 1 and 2 need the standard regime.
SymmetricMatrix sample_beta2(const BetaParams& params, BetaDefinition definition,
                             RngStream& rng);

inline constexpr int kF1RetryCap = 100;

// E ~ W_m(b, I) and H ~ W_m(a, I) independent, F1 = E^{-1} H. Redraws when
// the spectrum of F1 is degenerate; throws RetryExhausted after kF1RetryCap.
F1Sample sample_f1(const BetaParams& params, RngStream& rng);

// Draws n samples of F1 in fixed-size chunks, chunk k on stream
// (seed, kSampling, k), and calls visit(i, sample) for i in [0, n).
// visit runs concurrently for distinct i when threads > 1.
inline constexpr std::size_t kSampleChunk = 4096;
void for_each_f1(const BetaParams& params, std::size_t n, std::uint64_t seed,
                 unsigned threads,
                 const std::function<void(std::size_t, const F1Sample&)>& visit);

// log of B_m[a/2,b/2]^{-1} |F|^{(a-m-1)/2} |I+F|^{-(a+b)/2}.
LogDensity density_beta2(const SymmetricMatrix& f, const BetaParams& params);

// Joint density of the ordered latent roots l_1 > ... > l_m > 0.
LogDensity density_latent_roots(const Spectrum& s, const BetaParams& params);

// Density of F1 with Vol[J(m)] set to 1: divide by a volume estimate (or
// subtract its log) to normalize.
LogDensity density_f1_unnormalized(const GeneralMatrix& f1, const BetaParams& params);

// log of the factor multiplying J1 in the density of F1 obtained through the
// substitution H = E F1, and the factor multiplying J2 through E = H F1^{-1}.
double log_f11_prefactor(const GeneralMatrix& f1, const BetaParams& params);
double log_f12_prefactor(const GeneralMatrix& f1, const BetaParams& params);

// Closed forms of the two double integrals, given a value for Vol[J(m)].
LogDensity j1_closed(const GeneralMatrix& f1, const BetaParams& params, double vol_jordan);
LogDensity j2_closed(const GeneralMatrix& f1, const BetaParams& params, double vol_jordan);

}  // namespace mvbeta
