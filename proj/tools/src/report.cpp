#include "mvbeta_cli/cli.hpp"

#include "mvbeta/version.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace mvbeta::cli {

using nlohmann::json;

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["threads"] = c.threads;
  j["out"] = c.out_path;
  auto put = [&j](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  put("m", c.m);
  put("a", c.a);
  put("b", c.b);
  put("r", c.r);
  put("q", c.q);
  put("n", c.n);
  put("seed", c.seed);
  put("def", c.def);
  put("which", c.which);
  put("trials", c.trials);
  put("refs", c.refs);
  put("tolerance", c.tolerance);
  put("step", c.step);
  put("min_gap", c.min_gap);
  put("swap_exponents", c.swap_exponents);
  put("point", c.point);
  put("vol", c.vol);
  put("bootstrap", c.bootstrap);
  return j;
}

json to_json(const McReport& r) {
  json j;
  j["test_name"] = r.test_name;
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value ? json(*r.p_value) : json(nullptr);
  j["ci"] = r.ci ? json::array({r.ci->first, r.ci->second}) : json(nullptr);
  j["verdict"] = to_string(r.verdict);
  j["runtime_seconds"] = r.runtime_seconds;
  j["flags"] = r.flags;
  j["metrics"] = r.metrics;
  j["rows"] = r.rows;
  return j;
}

json to_json(const JacobianReport& r) {
  return {{"point", r.point},
          {"numeric", r.numeric_det},
          {"numeric_coarse", r.numeric_det_coarse},
          {"analytic", r.analytic_det},
          {"rel_err", r.rel_err},
          {"step", r.step},
          {"fd_disagreement", r.fd_disagreement},
          {"description", r.description}};
}

json to_json(const JacobianSweep& s) {
  json failures = json::array();
  for (const auto& f : s.failures) failures.push_back(to_json(f));
  return {{"which", to_string(s.which)},
          {"m", s.m},
          {"trials", s.trials},
          {"seed", s.seed},
          {"tolerance", s.tolerance},
          {"max_rel_err", s.max_rel_err},
          {"mean_rel_err", s.mean_rel_err},
          {"fd_disagreements", s.fd_disagreements},
          {"failures", failures},
          {"verdict", s.passed() ? "pass" : "fail"},
          {"config",
           {{"step", s.config.step},
            {"min_gap", s.config.min_gap},
            {"tolerance", s.config.tolerance},
            {"threads", s.config.threads}}}};
}

json to_json(const VolEstimate& v) {
  return {{"m", v.m},
          {"a", v.a},
          {"b", v.b},
          {"estimate", v.estimate},
          {"ci_low", v.ci_low},
          {"ci_high", v.ci_high},
          {"n", v.n},
          {"seed", v.seed},
          {"reference_points", v.reference_points},
          {"ratios", v.ratios},
          {"flags", v.flags},
          {"chart", v.chart},
          {"normalization", v.normalization},
          {"verdict", "informational"},
          {"runtime_seconds", v.runtime_seconds},
          {"options",
           {{"k_refs", v.options.k_refs},
            {"pilot", v.options.pilot},
            {"gap_threshold", v.options.gap_threshold},
            {"norm_percentile", v.options.norm_percentile},
            {"bootstrap", v.options.kde.bootstrap},
            {"confidence", v.options.kde.confidence}}}};
}

json make_envelope(const std::string& kind, const RunConfig& config, json report) {
  return {{"schema_version", kSchemaVersion},
          {"version", kVersion},
          {"kind", kind},
          {"config", to_json(config)},
          {"report", std::move(report)}};
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(parent, ec)) {
    throw IoError("directory does not exist: " + parent.string());
  }
  const fs::path tmp = fs::path(path + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename " + tmp.string() + " to " + path);
  }
}

void write_report(const std::string& kind, const RunConfig& config, json report,
                  const std::string& path) {
  write_atomically(path, make_envelope(kind, config, std::move(report)).dump(2) + "\n");
}

}  // namespace mvbeta::cli
