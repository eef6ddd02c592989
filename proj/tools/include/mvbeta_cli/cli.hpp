#pragma once

// Command-line front end: argument parsing, dispatch and report files.

#include "mvbeta/goodness_of_fit.hpp"
#include "mvbeta/jacobian_lab.hpp"
#include "mvbeta/mc_verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace mvbeta::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitUsage = 2,
  kExitRuntime = 3,
};

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kSeedEnvVar = "MVBETA_SEED";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options of one invocation. Unset fields do not apply to the command.
struct RunConfig {
  std::string command;
  std::optional<int> m;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> r;
  std::optional<double> q;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<int> def;
  std::optional<std::string> which;
  std::optional<int> trials;
  std::optional<int> refs;
  std::optional<double> tolerance;
  std::optional<double> step;
  std::optional<double> min_gap;
  std::optional<bool> swap_exponents;
  std::optional<std::string> point;
  std::optional<double> vol;
  std::optional<int> bootstrap;
  unsigned threads = 0;
  std::string out_path;
};

nlohmann::json to_json(const RunConfig& c);
nlohmann::json to_json(const McReport& r);
nlohmann::json to_json(const JacobianReport& r);
nlohmann::json to_json(const JacobianSweep& s);
nlohmann::json to_json(const VolEstimate& v);

// {schema_version, version, kind, config, report}, keys sorted.
nlohmann::json make_envelope(const std::string& kind, const RunConfig& config,
                             nlohmann::json report);

// Writes `content` to path.tmp and renames it over `path`. Throws IoError.
void write_atomically(const std::string& path, const std::string& content);

// Serializes make_envelope(...) with 2-space indent and a trailing newline.
void write_report(const std::string& kind, const RunConfig& config, nlohmann::json report,
                  const std::string& path);

// Parses argv, runs the command and returns an ExitCode. The summary goes to
// `out`; diagnostics and usage text go to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace mvbeta::cli
