#include "mvbeta_cli/cli.hpp"

#include "mvbeta/distributions.hpp"
#include "mvbeta/errors.hpp"
#include "mvbeta/special_functions.hpp"
#include "mvbeta/version.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <list>
#include <set>
#include <sstream>

namespace mvbeta::cli {

namespace {

inline constexpr std::uint64_t kSeedJacobian = 20061;
inline constexpr std::uint64_t kSeedSample = 20071;

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw DomainError("--point: empty entry in '" + text + "'");
    item = item.substr(first, last - first + 1);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw DomainError("--point: cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("--point: no values given");
  return out;
}

int verdict_exit(Verdict v) { return v == Verdict::kFail ? kExitFail : kExitPass; }

std::string summary_line(const McReport& r) {
  std::ostringstream s;
  s << r.test_name << ": n=" << r.n << " seed=" << r.seed << " statistic=" << fmt(r.statistic);
  if (r.p_value) s << " p=" << fmt(*r.p_value);
  s << " verdict=" << to_string(r.verdict);
  for (const auto& f : r.flags) s << " [" << f << "]";
  return s.str();
}

// Names of the coordinates of a chart, 1-based (row, column).
std::vector<std::string> vech_names(int m) {
  std::vector<std::string> names;
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i) names.push_back("vech_" + std::to_string(i + 1) + std::to_string(j + 1));
  }
  return names;
}

std::vector<std::string> vec_names(int m) {
  std::vector<std::string> names;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) names.push_back("vec_" + std::to_string(i + 1) + std::to_string(j + 1));
  }
  return names;
}

void append_csv_row(std::string& csv, const Vector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k > 0) csv += ',';
    csv += fmt(v(k));
  }
  csv += '\n';
}

// Raw option storage for one subcommand; `used` names the options it declares.
struct Command {
  CLI::App* app = nullptr;
  std::string path;
  std::set<std::string> used;
  int m = 2;
  double a = 4.0;
  double b = 4.0;
  double r = 1.0;
  double q = 1.0;
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  int def = 1;
  std::string which;
  int trials = 10;
  int refs = 16;
  double tolerance = 0.0;
  double step = kDefaultFdStep;
  double min_gap = 0.1;
  bool swap_exponents = false;
  std::string point;
  double vol = 1.0;
  int bootstrap = 200;
  std::string out_path;
  std::function<int(Command&, const RunConfig&, std::ostream&)> run;

  RunConfig config(unsigned threads) const {
    RunConfig c;
    c.command = path;
    c.threads = threads;
    c.out_path = out_path;
    auto has = [this](const char* k) { return used.count(k) > 0; };
    if (has("m")) c.m = m;
    if (has("a")) c.a = a;
    if (has("b")) c.b = b;
    if (has("r")) c.r = r;
    if (has("q")) c.q = q;
    if (has("n")) c.n = n;
    if (has("seed")) c.seed = seed;
    if (has("def")) c.def = def;
    if (has("which")) c.which = which;
    if (has("trials")) c.trials = trials;
    if (has("refs")) c.refs = refs;
    if (has("tolerance")) c.tolerance = tolerance;
    if (has("step")) c.step = step;
    if (has("min-gap")) c.min_gap = min_gap;
    if (has("swap-exponents")) c.swap_exponents = swap_exponents;
    if (has("point")) c.point = point;
    if (has("vol")) c.vol = vol;
    if (has("bootstrap")) c.bootstrap = bootstrap;
    return c;
  }
};

class OptionBuilder {
 public:
  explicit OptionBuilder(Command& c) : c_(c) {}

  OptionBuilder& m(bool required = true, int def = 2) {
    c_.m = def;
    auto* o = c_.app->add_option("--m", c_.m, "matrix order")->check(CLI::PositiveNumber);
    if (required) o->required();
    return mark("m");
  }
  OptionBuilder& a(const char* help = "first degrees of freedom (H ~ W_m(a, I))") {
    c_.app->add_option("--a", c_.a, help)->required();
    return mark("a");
  }
  OptionBuilder& b() {
    c_.app->add_option("--b", c_.b, "second degrees of freedom (E ~ W_m(b, I))")->required();
    return mark("b");
  }
  OptionBuilder& n(std::size_t def) {
    c_.n = def;
    c_.app->add_option("--n", c_.n, "number of draws")->capture_default_str();
    return mark("n");
  }
  OptionBuilder& seed(std::uint64_t def) {
    c_.seed = def;
    c_.app->add_option("--seed", c_.seed, "64-bit seed")
        ->envname(kSeedEnvVar)
        ->capture_default_str();
    return mark("seed");
  }
  OptionBuilder& out(bool required = false) {
    auto* o = c_.app->add_option("--out", c_.out_path, "report file (written atomically)");
    if (required) o->required();
    return *this;
  }
  OptionBuilder& bootstrap() {
    c_.app->add_option("--bootstrap", c_.bootstrap, "bootstrap replicates")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    return mark("bootstrap");
  }
  OptionBuilder& mark(const char* name) {
    c_.used.insert(name);
    return *this;
  }
  Command& cmd() { return c_; }

 private:
  Command& c_;
};

void emit_report(const std::string& kind, const RunConfig& cfg, nlohmann::json report) {
  if (!cfg.out_path.empty()) write_report(kind, cfg, std::move(report), cfg.out_path);
}

BetaParams params_of(const Command& c) { return BetaParams::make(c.m, c.a, c.b); }

// Errors raised while interpreting a user-supplied point are usage errors.
template <class F>
auto as_usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError&) {
    throw;
  } catch (const Error& e) {
    throw DomainError(e.what());
  }
}

// ---- handlers ---------------------------------------------------------------

int run_gamma(Command& c, const RunConfig& cfg, std::ostream& out) {
  const DomainCheckedReal g = checked_log_mv_gamma(c.m, c.r);
  out << fmt(std::exp(g.value)) << "\n" << "log " << fmt(g.value) << "\n";
  emit_report("scalar", cfg,
              {{"value", std::exp(g.value)}, {"log_value", g.value}, {"constraint", g.constraint}});
  return kExitPass;
}

int run_beta(Command& c, const RunConfig& cfg, std::ostream& out) {
  const DomainCheckedReal g = checked_log_mv_beta(c.m, c.r, c.q);
  out << fmt(std::exp(g.value)) << "\n" << "log " << fmt(g.value) << "\n";
  emit_report("scalar", cfg,
              {{"value", std::exp(g.value)}, {"log_value", g.value}, {"constraint", g.constraint}});
  return kExitPass;
}

int run_vol_orthogonal(Command& c, const RunConfig& cfg, std::ostream& out) {
  const double lv = log_vol_orthogonal(c.m);
  out << fmt(std::exp(lv)) << "\n" << "log " << fmt(lv) << "\n";
  emit_report("scalar", cfg, {{"value", std::exp(lv)}, {"log_value", lv}});
  return kExitPass;
}

// Draws in chunks of kSampleChunk, chunk k on stream (seed, kSampling, k).
std::string sample_csv(std::size_t n, std::uint64_t seed, const std::vector<std::string>& header,
                       const std::function<Vector(RngStream&)>& draw) {
  std::string csv;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) csv += ',';
    csv += header[i];
  }
  csv += '\n';
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
    RngStream rng(seed, StreamDomain::kSampling, chunk);
    const std::size_t end = std::min(n, (chunk + 1) * kSampleChunk);
    for (std::size_t i = chunk * kSampleChunk; i < end; ++i) append_csv_row(csv, draw(rng));
  }
  return csv;
}

void emit_csv(const std::string& csv, const RunConfig& cfg, std::ostream& out, std::size_t n) {
  if (cfg.out_path.empty()) {
    out << csv;
  } else {
    write_atomically(cfg.out_path, csv);
    out << "wrote " << n << " rows to " << cfg.out_path << "\n";
  }
}

int run_sample_wishart(Command& c, const RunConfig& cfg, std::ostream& out) {
  if (!(c.a >= c.m)) throw DomainError("dof must be ≥ m");
  const std::string csv = sample_csv(c.n, c.seed, vech_names(c.m), [&c](RngStream& rng) {
    return vech(sample_wishart(c.m, c.a, rng).matrix.entries());
  });
  emit_csv(csv, cfg, out, c.n);
  return kExitPass;
}

int run_sample_beta2(Command& c, const RunConfig& cfg, std::ostream& out) {
  const BetaParams p = params_of(c);
  const BetaDefinition def = beta_definition_from_int(c.def);
  const int order = def == BetaDefinition::kQuadraticForm ? static_cast<int>(c.a) : c.m;
  const std::string csv = sample_csv(c.n, c.seed, vech_names(order), [&](RngStream& rng) {
    return vech(sample_beta2(p, def, rng).entries());
  });
  emit_csv(csv, cfg, out, c.n);
  return kExitPass;
}

int run_sample_f1(Command& c, const RunConfig& cfg, std::ostream& out) {
  const BetaParams p = params_of(c);
  const std::string csv = sample_csv(c.n, c.seed, vec_names(c.m), [&p](RngStream& rng) {
    return vec(sample_f1(p, rng).f1.entries());
  });
  emit_csv(csv, cfg, out, c.n);
  return kExitPass;
}

int print_density(const LogDensity& d, const RunConfig& cfg, std::ostream& out) {
  out << "log_density " << fmt(d.log_value) << "\n" << "density " << fmt(d.linear()) << "\n";
  emit_report("density", cfg,
              {{"log_value", d.log_value}, {"value", d.linear()}, {"finite", d.finite}});
  return kExitPass;
}

int run_density_beta2(Command& c, const RunConfig& cfg, std::ostream& out) {
  const BetaParams p = params_of(c);
  const auto v = parse_point(c.point);
  const SymmetricMatrix f = as_usage([&] {
    Vector x = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    return unvech(x, c.m);
  });
  return print_density(as_usage([&] { return density_beta2(f, p); }), cfg, out);
}

int run_density_roots(Command& c, const RunConfig& cfg, std::ostream& out) {
  const BetaParams p = params_of(c);
  auto v = parse_point(c.point);
  return print_density(
      as_usage([&] { return density_latent_roots(Spectrum::from_values(v), p); }), cfg, out);
}

int run_density_f1(Command& c, const RunConfig& cfg, std::ostream& out) {
  const BetaParams p = params_of(c);
  if (!(c.vol > 0.0)) throw DomainError("--vol must be positive");
  const auto v = parse_point(c.point);
  const LogDensity d = as_usage([&] {
    if (static_cast<long>(v.size()) != static_cast<long>(c.m) * c.m) {
      throw LengthMismatch("--point must hold m*m entries (column-major vec)");
    }
    Vector x = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    return density_f1_unnormalized(GeneralMatrix(unvec(x, c.m)), p);
  });
  const double lv = d.log_value - std::log(c.vol);
  return print_density(LogDensity{lv, std::isfinite(lv)}, cfg, out);
}

int run_verify_jacobian(Command& c, const RunConfig& cfg, std::ostream& out) {
  const JacobianCheck which = jacobian_check_from_string(c.which);
  SweepConfig sc;
  sc.step = c.step;
  sc.min_gap = c.min_gap;
  sc.tolerance = c.tolerance;
  sc.threads = cfg.threads;
  const JacobianSweep s = run_jacobian_sweep(which, c.m, c.trials, c.seed, sc);
  out << "jacobian/" << to_string(which) << ": m=" << s.m << " trials=" << s.trials
      << " max_rel_err=" << fmt(s.max_rel_err) << " tolerance=" << fmt(s.tolerance)
      << " verdict=" << (s.passed() ? "pass" : "fail") << "\n";
  emit_report("jacobian_sweep", cfg, to_json(s));
  return s.passed() ? kExitPass : kExitFail;
}

int run_mc(const McReport& r, const RunConfig& cfg, std::ostream& out) {
  out << summary_line(r) << "\n";
  emit_report("mc_report", cfg, to_json(r));
  return verdict_exit(r.verdict);
}

int run_verify_eig_density(Command& c, const RunConfig& cfg, std::ostream& out) {
  const BetaParams p = params_of(c);
  RootDensityOptions opts;
  opts.swap_exponents = c.swap_exponents;
  opts.threads = cfg.threads;
  // a < m: the quadratic-form variate, tested through the substitution rule.
  if (p.regime == Regime::kQuadraticFormOnly) {
    return run_mc(verify_substitution_rule(p, c.n, c.seed, opts), cfg, out);
  }
  return run_mc(verify_root_density(p, c.n, c.seed, opts), cfg, out);
}

int run_verify_spectra(Command& c, const RunConfig& cfg, std::ostream& out) {
  return run_mc(spectral_equality_suite(params_of(c), c.n, c.seed, cfg.threads), cfg, out);
}

int run_estimate_vol(Command& c, const RunConfig& cfg, std::ostream& out) {
  VolOptions opts;
  opts.k_refs = c.refs;
  opts.kde.bootstrap = c.bootstrap;
  opts.threads = cfg.threads;
  const VolEstimate v = estimate_vol_jordan(params_of(c), c.n, c.seed, opts);
  out << "estimate-vol: m=" << v.m << " a=" << fmt(v.a) << " b=" << fmt(v.b) << " n=" << v.n
      << " seed=" << v.seed << " estimate=" << fmt(v.estimate) << " ci=[" << fmt(v.ci_low)
      << ", " << fmt(v.ci_high) << "] refs=" << v.reference_points.size()
      << " verdict=informational";
  for (const auto& f : v.flags) out << " [" << f << "]";
  out << "\n";
  emit_report("vol_estimate", cfg, to_json(v));
  return kExitPass;
}

int run_f1_shape(Command& c, const RunConfig& cfg, std::ostream& out) {
  KdeOptions kde;
  kde.bootstrap = c.bootstrap;
  const McReport r = f1_shape_experiment(params_of(c), c.n, c.seed, default_shape_pairs(), kde,
                                         cfg.threads);
  out << summary_line(r) << "\n";
  for (const auto& row : r.rows) {
    out << "  l=(" << fmt(row.at("l1")) << ", " << fmt(row.at("l2")) << ") t=" << fmt(row.at("t"))
        << " ratio=" << fmt(row.at("ratio")) << " ci=[" << fmt(row.at("ci_low")) << ", "
        << fmt(row.at("ci_high")) << "]\n";
  }
  emit_report("mc_report", cfg, to_json(r));
  return kExitPass;
}

// ---- application ------------------------------------------------------------

class Application {
 public:
  Application() : app_("Matrix-variate beta type II toolkit", "mvbeta") {
    app_.set_version_flag("--version", std::string(kVersion));
    app_.set_config("--config", "", "TOML file with option values; flags take precedence");
    app_.add_option("--threads", threads_, "worker thread cap (0 = all cores)")
        ->capture_default_str();
    app_.require_subcommand(1);
    app_.fallthrough();

    auto& gamma = add(&app_, "gamma", "multivariate gamma Gamma_m(r)", run_gamma);
    OptionBuilder(gamma).m().mark("r").out();
    gamma.app->add_option("--r", gamma.r, "argument, r > (m-1)/2")->required();

    auto& beta = add(&app_, "beta", "multivariate beta B_m(r, q)", run_beta);
    OptionBuilder(beta).m().mark("r").mark("q").out();
    beta.app->add_option("--r", beta.r, "first argument")->required();
    beta.app->add_option("--q", beta.q, "second argument")->required();

    auto& volo = add(&app_, "vol-orthogonal", "volume of O(m)", run_vol_orthogonal);
    OptionBuilder(volo).m().out();

    CLI::App* sample = group("sample", "draw samples as CSV");
    auto& sw = add(sample, "wishart", "W_m(a, I); columns vech (column-major lower triangle)",
                   run_sample_wishart);
    OptionBuilder(sw).m().a("degrees of freedom").n(10).seed(kSeedSample).out();
    auto& sb = add(sample, "beta2", "matrix beta type II; columns vech", run_sample_beta2);
    OptionBuilder(sb).m().a().b().n(10).seed(kSeedSample).mark("def").out();
    sb.app->add_option("--def", sb.def, "construction: 1, 2 or 3 (quadratic form, a x a)")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    auto& sf = add(sample, "f1", "F1 = E^{-1} H; columns vec (column-major)", run_sample_f1);
    OptionBuilder(sf).m().a().b().n(10).seed(kSeedSample).out();

    CLI::App* density = group("density", "evaluate a closed-form density");
    auto& db = add(density, "beta2", "beta type II density at vech(F)", run_density_beta2);
    OptionBuilder(db).m().a().b().mark("point").out();
    db.app->add_option("--point", db.point, "comma-separated vech(F)")->required();
    auto& dr = add(density, "roots", "latent-root density at l1 > ... > lm", run_density_roots);
    OptionBuilder(dr).m().a().b().mark("point").out();
    dr.app->add_option("--point", dr.point, "comma-separated roots")->required();
    auto& df = add(density, "f1", "density of F1 at vec(F1), divided by --vol", run_density_f1);
    OptionBuilder(df).m().a().b().mark("point").mark("vol").out();
    df.app->add_option("--point", df.point, "comma-separated vec(F1), column-major")->required();
    df.app->add_option("--vol", df.vol, "value used for Vol[J(m)]")->capture_default_str();

    CLI::App* verify = group("verify", "verification runs with pass/fail verdicts");
    auto& vj = add(verify, "jacobian", "finite-difference Jacobian sweep", run_verify_jacobian);
    OptionBuilder(vj).m().seed(kSeedJacobian).out().mark("which").mark("trials").mark(
        "tolerance").mark("step").mark("min-gap");
    vj.app->add_option("--which", vj.which, "congruence|square|jordan|polar|scalar")
        ->required()
        ->check(CLI::IsMember({"congruence", "square", "jordan", "polar", "scalar"}));
    vj.app->add_option("--trials", vj.trials, "random points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    vj.app->add_option("--tolerance", vj.tolerance, "relative tolerance (0 = default)")
        ->capture_default_str();
    vj.app->add_option("--step", vj.step, "finite-difference step")->capture_default_str();
    vj.app->add_option("--min-gap", vj.min_gap, "spectral gap floor for random points")
        ->capture_default_str();
    auto& ve = add(verify, "eig-density", "goodness of fit of the latent-root law",
                   run_verify_eig_density);
    OptionBuilder(ve).m().a().b().n(100000).seed(kSeedRootDensity).out().mark("swap-exponents");
    ve.app->add_flag("--swap-exponents", ve.swap_exponents,
                     "evaluate the reference density at (b, a): misfit control");
    auto& vs = add(verify, "spectra", "latent roots agree across the five constructions",
                   run_verify_spectra);
    OptionBuilder(vs).m().a().b().n(1000).seed(kSeedSpectra).out();

    auto& ev = add(&app_, "estimate-vol", "kernel estimate of Vol[J(m)], m = 1 or 2",
                   run_estimate_vol);
    OptionBuilder(ev).m().a().b().n(100000).seed(kSeedVol).bootstrap().out().mark("refs");
    ev.app->add_option("--refs", ev.refs, "reference points")->capture_default_str();

    CLI::App* experiment = group("experiment", "informational experiments");
    auto& fs = add(experiment, "f1-shape", "KDE density ratio across similarity shapes",
                   run_f1_shape);
    OptionBuilder(fs).m(false, 2).a().b().n(1000000).seed(kSeedShape).bootstrap().out();
  }

  int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << deepest()->help();
      return kExitPass;
    } catch (const CLI::CallForAllHelp&) {
      out << app_.help("", CLI::AppFormatMode::All);
      return kExitPass;
    } catch (const CLI::CallForVersion&) {
      out << kVersion << "\n";
      return kExitPass;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n\n" << deepest()->help();
      return kExitUsage;
    }
    Command* cmd = nullptr;
    for (auto& c : commands_) {
      if (c.app->parsed()) cmd = &c;
    }
    if (cmd == nullptr) {
      err << deepest()->help();
      return kExitUsage;
    }
    try {
      return cmd->run(*cmd, cmd->config(threads_), out);
    } catch (const DomainError& e) {
      err << "error: " << e.what() << "\n\n" << cmd->app->help();
      return kExitUsage;
    } catch (const IoError& e) {
      err << "io error: " << e.what() << "\n";
      return kExitRuntime;
    } catch (const std::exception& e) {
      err << "runtime error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }

 private:
  using Handler = int (*)(Command&, const RunConfig&, std::ostream&);

  Command& add(CLI::App* parent, const std::string& name, const std::string& help,
               Handler handler) {
    Command& c = commands_.emplace_back();
    c.app = parent->add_subcommand(name, help);
    c.app->fallthrough();
    c.path = parent == &app_ ? name : parent->get_name() + " " + name;
    c.run = handler;
    return c;
  }

  CLI::App* group(const std::string& name, const std::string& help) {
    CLI::App* g = app_.add_subcommand(name, help);
    g->require_subcommand(1);
    g->fallthrough();
    return g;
  }

  CLI::App* deepest() {
    CLI::App* cur = &app_;
    while (!cur->get_subcommands().empty()) cur = cur->get_subcommands().front();
    return cur;
  }

  CLI::App app_;
  unsigned threads_ = 0;
  std::list<Command> commands_;
};

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Application app;
  return app.run(argc, argv, out, err);
}

int dispatch(int argc, const char* const* argv) { return dispatch(argc, argv, std::cout, std::cerr); }

}  // namespace mvbeta::cli
