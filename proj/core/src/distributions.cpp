#include "mvbeta/distributions.hpp"

#include "mvbeta/errors.hpp"
#include "mvbeta/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mvbeta {

namespace {

bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

void require_density_regime(const BetaParams& p) {
  if (p.regime == Regime::kQuadraticFormOnly) {
    throw DomainError("density: a < m needs substitute_params before evaluation");
  }
}

void require_order_match(int got, int m, const char* what) {
  if (got != m) {
    throw DomainError(std::string(what) + ": order " + std::to_string(got) +
                      " does not match m = " + std::to_string(m));
  }
}

// log of pi^{m^2/2} / (Gamma_m[m/2] B_m[a/2, b/2]).
double log_root_constant(const BetaParams& p) {
  return 0.5 * p.m * p.m * std::log(std::numbers::pi) - log_mv_gamma(p.m, 0.5 * p.m) -
         log_mv_beta(p.m, 0.5 * p.a, 0.5 * p.b);
}

struct RootSums {
  double log_det = 0.0;            // sum log l_i
  double log_det_shift = 0.0;      // sum log(1 + l_i)
  double log_vandermonde = 0.0;    // sum_{i<j} log(l_i - l_j)
};

RootSums root_sums(const Spectrum& s) {
  RootSums out;
  const int m = s.size();
  for (int i = 0; i < m; ++i) {
    out.log_det += std::log(s[i]);
    out.log_det_shift += std::log1p(s[i]);
    for (int j = i + 1; j < m; ++j) out.log_vandermonde += std::log(s[i] - s[j]);
  }
  return out;
}

LogDensity make_density(double v) { return {v, std::isfinite(v)}; }

Spectrum f1_spectrum(const GeneralMatrix& f1, const BetaParams& p) {
  require_density_regime(p);
  require_order_match(f1.order(), p.m, "F1");
  return general_eig_real(f1);
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kStandard:
      return "standard";
    case Regime::kQuadraticFormOnly:
      return "quadratic-form-only";
    case Regime::kSubstituted:
      return "substituted";
  }
  return "unknown";
}

BetaParams BetaParams::make(int m, double a, double b) {
  if (m < 1) throw DomainError("m must be a positive integer");
  if (!std::isfinite(a) || !(a > 0.0)) throw DomainError("a must be positive");
  if (!std::isfinite(b) || b < m) throw DomainError("b must be >= m");
  return {m, a, b, a >= m ? Regime::kStandard : Regime::kQuadraticFormOnly};
}

BetaParams BetaParams::standard(int m, double a, double b) {
  BetaParams p = make(m, a, b);
  if (p.regime != Regime::kStandard) throw DomainError("a must be >= m");
  return p;
}

BetaParams substitute_params(const BetaParams& p) {
  if (p.regime != Regime::kQuadraticFormOnly) {
    throw DomainError("substitute_params: only defined for a < m (got " + to_string(p.regime) +
                      " regime)");
  }
  if (!is_integer(p.a)) throw DomainError("substitute_params: a must be an integer");
  return {static_cast<int>(p.a), static_cast<double>(p.m), p.b + p.a - p.m,
          Regime::kSubstituted};
}

double LogDensity::linear() const { return std::exp(log_value); }

BetaDefinition beta_definition_from_int(int def) {
  switch (def) {
    case 1:
      return BetaDefinition::kWhitenedH;
    case 2:
      return BetaDefinition::kWhitenedEInverse;
    case 3:
      return BetaDefinition::kQuadraticForm;
    default:
      throw DomainError("beta type II definition must be 1, 2 or 3");
  }
}

Matrix sample_matrix_normal(int rows, int cols, RngStream& rng) {
  Matrix out(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) out(i, j) = rng.normal();
  }
  return out;
}

WishartSample sample_wishart(int m, double dof, RngStream& rng) {
  if (m < 1) throw DomainError("m must be a positive integer");
  if (!(dof >= m)) throw DomainError("dof must be ≥ m");
  Matrix l = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    l(i, i) = std::sqrt(rng.chi_square(dof - i));
    for (int j = 0; j < i; ++j) l(i, j) = rng.normal();
  }
  return {PDMatrix::from_raw(l * l.transpose()), dof, true};
}

SymmetricMatrix build_beta2(const SymmetricMatrix& y1_gram, const PDMatrix& y2_gram,
                            BetaDefinition definition, const std::optional<Matrix>& y1_raw) {
  const int m = y2_gram.order();
  switch (definition) {
    case BetaDefinition::kWhitenedH: {
      require_order_match(y1_gram.order(), m, "Y1'Y1");
      const PDMatrix h(y1_gram);
      const Matrix w = pd_inv_sqrt(y2_gram).entries();
      return SymmetricMatrix::from_raw(w * h.entries() * w);
    }
    case BetaDefinition::kWhitenedEInverse: {
      require_order_match(y1_gram.order(), m, "Y1'Y1");
      const Matrix r = pd_sqrt(PDMatrix(y1_gram)).entries();
      return SymmetricMatrix::from_raw(r * y2_gram.inverse() * r);
    }
    case BetaDefinition::kQuadraticForm: {
      if (!y1_raw) throw MissingRaw("build_beta2: the quadratic form needs the raw Y1 matrix");
      if (y1_raw->cols() != m) {
        throw DomainError("build_beta2: Y1 must have m = " + std::to_string(m) + " columns");
      }
      return SymmetricMatrix::from_raw(*y1_raw * y2_gram.inverse() * y1_raw->transpose());
    }
  }
  throw DomainError("build_beta2: unknown definition");
}

SymmetricMatrix sample_beta2(const BetaParams& params, BetaDefinition definition,
                             RngStream& rng) {
  if (!is_integer(params.a) || !is_integer(params.b)) {
    throw DomainError("sample_beta2: a and b are row counts and must be integers");
  }
  if (definition != BetaDefinition::kQuadraticForm && params.regime != Regime::kStandard) {
    throw DomainError("sample_beta2: definitions 1 and 2 need a >= m");
  }
  const Matrix y1 = sample_matrix_normal(static_cast<int>(params.a), params.m, rng);
  const Matrix y2 = sample_matrix_normal(static_cast<int>(params.b), params.m, rng);
  const PDMatrix e = PDMatrix::from_raw(y2.transpose() * y2);
  const SymmetricMatrix h = SymmetricMatrix::from_raw(y1.transpose() * y1);
  return build_beta2(h, e, definition,
                     definition == BetaDefinition::kQuadraticForm ? std::optional<Matrix>(y1)
                                                                  : std::nullopt);
}

F1Sample sample_f1(const BetaParams& params, RngStream& rng) {
  if (params.regime != Regime::kStandard) {
    throw DomainError("sample_f1: needs the standard regime a >= m, b >= m");
  }
  for (int attempt = 0; attempt < kF1RetryCap; ++attempt) {
    WishartSample e = sample_wishart(params.m, params.b, rng);
    WishartSample h = sample_wishart(params.m, params.a, rng);
    Matrix f1 = e.matrix.chol().transpose().triangularView<Eigen::Upper>().solve(
        e.matrix.chol().triangularView<Eigen::Lower>().solve(h.matrix.entries()));
    GeneralMatrix g(std::move(f1));
    try {
      Spectrum s = general_eig_real(g);
      return {std::move(g), std::move(e.matrix), std::move(h.matrix), std::move(s)};
    } catch (const DegenerateSpectrum&) {
    } catch (const ComplexSpectrum&) {
    }
  }
  throw RetryExhausted("sample_f1: " + std::to_string(kF1RetryCap) +
                       " consecutive degenerate draws");
}

void for_each_f1(const BetaParams& params, std::size_t n, std::uint64_t seed, unsigned threads,
                 const std::function<void(std::size_t, const F1Sample&)>& visit) {
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  parallel_chunks(chunks, threads, [&](std::size_t chunk) {
    RngStream rng(seed, StreamDomain::kSampling, chunk);
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t end = std::min(n, begin + kSampleChunk);
    for (std::size_t i = begin; i < end; ++i) visit(i, sample_f1(params, rng));
  });
}

LogDensity density_beta2(const SymmetricMatrix& f, const BetaParams& params) {
  require_density_regime(params);
  require_order_match(f.order(), params.m, "F");
  const Matrix l = cholesky(f);
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const Matrix shifted = Matrix::Identity(params.m, params.m) + f.entries();
  const double log_det_shift =
      2.0 * cholesky(SymmetricMatrix::from_raw(shifted)).diagonal().array().log().sum();
  const double v = -log_mv_beta(params.m, 0.5 * params.a, 0.5 * params.b) +
                   0.5 * (params.a - params.m - 1) * log_det -
                   0.5 * (params.a + params.b) * log_det_shift;
  return make_density(v);
}

LogDensity density_latent_roots(const Spectrum& s, const BetaParams& params) {
  require_density_regime(params);
  require_order_match(s.size(), params.m, "spectrum");
  s.require_separated();
  const RootSums r = root_sums(s);
  const double v = log_root_constant(params) + 0.5 * (params.a - params.m - 1) * r.log_det -
                   0.5 * (params.a + params.b) * r.log_det_shift + r.log_vandermonde;
  return make_density(v);
}

LogDensity density_f1_unnormalized(const GeneralMatrix& f1, const BetaParams& params) {
  const RootSums r = root_sums(f1_spectrum(f1, params));
  const double v = log_root_constant(params) + 0.5 * (params.a - params.m - 1) * r.log_det -
                   0.5 * (params.a + params.b) * r.log_det_shift - r.log_vandermonde;
  return make_density(v);
}

namespace {

double log_wishart_pair_constant(const BetaParams& p) {
  return 0.5 * (p.a + p.b) * p.m * std::numbers::ln2 + log_mv_gamma(p.m, 0.5 * p.a) +
         log_mv_gamma(p.m, 0.5 * p.b);
}

// log of 2^{(a+b)m/2} pi^{m^2/2} Gamma_m[(a+b)/2] / (Gamma_m[m/2] Vol).
double log_closed_form_constant(const BetaParams& p, double vol_jordan) {
  if (!(vol_jordan > 0.0) || !std::isfinite(vol_jordan)) {
    throw DomainError("Vol[J(m)] must be a positive finite number");
  }
  return 0.5 * (p.a + p.b) * p.m * std::numbers::ln2 +
         0.5 * p.m * p.m * std::log(std::numbers::pi) + log_mv_gamma(p.m, 0.5 * (p.a + p.b)) -
         log_mv_gamma(p.m, 0.5 * p.m) - std::log(vol_jordan);
}

}  // namespace

double log_f11_prefactor(const GeneralMatrix& f1, const BetaParams& params) {
  const RootSums r = root_sums(f1_spectrum(f1, params));
  return 0.5 * (params.a + params.m - 1) * r.log_det - log_wishart_pair_constant(params);
}

double log_f12_prefactor(const GeneralMatrix& f1, const BetaParams& params) {
  const RootSums r = root_sums(f1_spectrum(f1, params));
  return -0.5 * (params.b + params.m + 1) * r.log_det - log_wishart_pair_constant(params);
}

LogDensity j1_closed(const GeneralMatrix& f1, const BetaParams& params, double vol_jordan) {
  const RootSums r = root_sums(f1_spectrum(f1, params));
  const double v = log_closed_form_constant(params, vol_jordan) - params.m * r.log_det -
                   0.5 * (params.a + params.b) * r.log_det_shift - r.log_vandermonde;
  return make_density(v);
}

LogDensity j2_closed(const GeneralMatrix& f1, const BetaParams& params, double vol_jordan) {
  f1_spectrum(f1, params);
  // mu_i = ch_i(F1^{-1}) taken from the inverse directly.
  const Spectrum mu = general_eig_real(GeneralMatrix(f1.entries().inverse()));
  double log_shift = 0.0;
  double log_pairs = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    log_shift += std::log1p(mu[i]);
    for (int j = i + 1; j < mu.size(); ++j) {
      log_pairs += std::log(mu[i]) + std::log(mu[j]) - std::log(mu[i] - mu[j]);
    }
  }
  const double v = log_closed_form_constant(params, vol_jordan) -
                   0.5 * (params.a + params.b) * log_shift + log_pairs;
  return make_density(v);
}

}  // namespace mvbeta
