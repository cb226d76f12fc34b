#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qtradeoff/scenario.hpp"
#include "qtradeoff/tradeoff.hpp"

namespace qtradeoff::cli {

enum class Command { curve, endpoints, verify, selftest };
enum class Mode { lagrangian, constrained, endpoints, verify, selftest };
enum class Format { csv, json };

struct RunConfig {
  Command command = Command::curve;
  std::string scenario;
  std::optional<std::size_t> d;
  std::optional<std::string> j;
  Mode mode = Mode::lagrangian;
  std::size_t grid_points = 25;
  double lambda_max = 1e3;
  std::vector<double> g_list;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double gap_tol = 1e-8;
  double feas_tol = 1e-9;
  std::string out_path;
  Format format = Format::csv;
  /// 0 means machine parallelism.
  unsigned threads = 0;
};

/// Bad flags, bad config file or inconsistent settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Outcome of argument parsing: a config to run, or an exit code when
/// parsing already produced the final output (--help, errors).
struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = 0;
};

/// Flags override values read from --config. Writes help and parse errors
/// to the given streams.
ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Checks cross-field consistency; throws ConfigError.
void validate(const RunConfig& config);

/// Builds the scenario named in the config; throws ConfigError.
Scenario make_scenario(const RunConfig& config);

std::string to_string(Command command);
std::string to_string(Mode mode);
std::string to_string(Format format);

/// Stable 16-hex-digit digest of every setting that affects results.
std::string config_hash(const RunConfig& config);

/// Fixed CSV header.
inline constexpr const char* kCsvHeader = "scenario,param,lambda,G,F,duality_gap,primal_residual,status,seed";

std::string format_csv(const RunConfig& config, const Scenario& s, const std::vector<TradeoffPoint>& points);
std::string format_json(const RunConfig& config, const Scenario& s, const std::vector<TradeoffPoint>& points);

/// Number with 17 significant digits; "inf", "-inf", "nan" for non-finite.
std::string format_number(double value);

/// Exit codes: 0 success, 2 some points failed or were refused, 1 fatal.
/// Per-point summaries go to `out` when results are written to a file, and
/// to `err` when the results themselves go to `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Fast oracle checks, one PASS/FAIL line each. Returns the failure count.
int run_selftest(std::uint64_t seed, std::ostream& out);

/// parse_args + validate + run, with exceptions mapped to exit code 1.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qtradeoff::cli
