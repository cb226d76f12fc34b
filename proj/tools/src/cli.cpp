#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace qtradeoff::cli {

namespace {

const std::map<std::string, Command> kCommands{{"curve", Command::curve},
                                               {"endpoints", Command::endpoints},
                                               {"verify", Command::verify},
                                               {"selftest", Command::selftest}};
const std::map<std::string, Mode> kModes{{"lagrangian", Mode::lagrangian},
                                         {"constrained", Mode::constrained},
                                         {"endpoints", Mode::endpoints},
                                         {"verify", Mode::verify},
                                         {"selftest", Mode::selftest}};
const std::map<std::string, Format> kFormats{{"csv", Format::csv}, {"json", Format::json}};

Mode implied_mode(Command command) {
  switch (command) {
    case Command::curve:
      return Mode::lagrangian;
    case Command::endpoints:
      return Mode::endpoints;
    case Command::verify:
      return Mode::verify;
    case Command::selftest:
      return Mode::selftest;
  }
  return Mode::lagrangian;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

TradeoffOptions tradeoff_options(const RunConfig& config) {
  TradeoffOptions options;
  options.sdp.gap_tol = config.gap_tol;
  options.sdp.feas_tol = config.feas_tol;
  options.threads = config.threads;
  return options;
}

std::string lambda_field(const TradeoffPoint& p) { return p.lambda ? format_number(*p.lambda) : std::string(); }

nlohmann::json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json j;
  j["command"] = to_string(config.command);
  j["scenario"] = config.scenario;
  if (config.d) j["d"] = *config.d;
  if (config.j) j["j"] = *config.j;
  j["mode"] = to_string(config.mode);
  j["grid_points"] = config.grid_points;
  j["lambda_max"] = config.lambda_max;
  j["g_list"] = config.g_list;
  j["samples"] = config.samples;
  j["seed"] = config.seed;
  j["gap_tol"] = config.gap_tol;
  j["feas_tol"] = config.feas_tol;
  j["out"] = config.out_path;
  j["format"] = to_string(config.format);
  return j;
}

std::string summary_line(const Scenario& s, const TradeoffPoint& p) {
  std::ostringstream line;
  line << s.name() << ' ' << s.parameter();
  if (p.lambda) line << " lambda=" << format_number(*p.lambda);
  if (p.target_g) line << " target=" << format_number(*p.target_g);
  char buf[160];
  std::snprintf(buf, sizeof buf, " G=%.10f F=%.10f gap=%.2e residual=%.2e status=", p.g, p.f,
                p.diagnostics.duality_gap, p.diagnostics.primal_residual);
  line << buf << to_string(p.status);
  if (p.verification) {
    const Verification& v = *p.verification;
    std::snprintf(buf, sizeof buf, " F_mc=%.6f+-%.1e G_mc=%.6f+-%.1e", v.f_estimate, v.f_stderr, v.g_estimate,
                  v.g_stderr);
    line << buf;
  }
  if (!p.diagnostics.message.empty() && !p.ok()) line << " (" << p.diagnostics.message << ')';
  return line.str();
}

constexpr double kVerificationSigmas = 4.0;

bool verification_ok(const TradeoffPoint& p) {
  return !p.verification || p.verification->consistent_with(p.f, p.g, kVerificationSigmas);
}

std::vector<TradeoffPoint> compute_points(const RunConfig& config, const Scenario& s) {
  const TradeoffOptions options = tradeoff_options(config);
  switch (config.mode) {
    case Mode::lagrangian: {
      const std::vector<double> grid = default_lambda_grid(config.grid_points, config.lambda_max);
      return curve_lagrangian(s, grid, options);
    }
    case Mode::constrained: {
      std::vector<double> targets = config.g_list;
      if (targets.empty()) {
        const double lo = identity_g(s), hi = max_g(s, options).g;
        for (std::size_t k = 1; k <= config.grid_points; ++k)
          targets.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(config.grid_points + 1));
      }
      return curve_constrained(s, targets, options);
    }
    case Mode::endpoints: {
      const double lambdas[] = {0.0, std::numeric_limits<double>::infinity()};
      return curve_lagrangian(s, lambdas, options);
    }
    case Mode::verify: {
      std::vector<double> targets = config.g_list;
      if (targets.empty()) targets.push_back(0.5 * (identity_g(s) + max_g(s, options).g));
      std::vector<TradeoffPoint> points = curve_constrained(s, targets, options);
      Rng rng(config.seed);
      for (TradeoffPoint& p : points)
        if (p.ok() && p.seed) p.verification = verify_fidelities(s, *p.seed, config.samples, rng);
      return points;
    }
    case Mode::selftest:
      break;
  }
  return {};
}

}  // namespace

std::string to_string(Command command) {
  for (const auto& [name, value] : kCommands)
    if (value == command) return name;
  return "unknown";
}

std::string to_string(Mode mode) {
  for (const auto& [name, value] : kModes)
    if (value == mode) return name;
  return "unknown";
}

std::string to_string(Format format) { return format == Format::json ? "json" : "csv"; }

ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal information-disturbance tradeoff for covariant quantum state families.", "qtradeoff"};
  app.set_config("--config", "", "key=value file (# comments); command-line flags take precedence");
  app.allow_config_extras(false);
  app.footer(
      "Commands:\n"
      "  curve      trace the F(G) frontier (--mode lagrangian or constrained)\n"
      "  endpoints  G of the identity channel, maximal G and F at maximal G\n"
      "  verify     constrained solve at --g-list (default: mid-range G), checked by Monte Carlo\n"
      "  selftest   fast oracle checks\n"
      "Constrained targets within 1e-4 of either end of the achievable G range are\n"
      "refused; use the Lagrangian mode for the end points.\n"
      "Exit status: 0 success, 2 some points failed or were refused, 1 fatal error.");

  RunConfig config;
  std::string command, mode, format;
  std::size_t d = 0;
  std::string j;
  app.add_option("command", command, "curve | endpoints | verify | selftest")
      ->required()
      ->check(CLI::IsMember({"curve", "endpoints", "verify", "selftest"}));
  app.add_option("--scenario", config.scenario, "pure | maxent | spin");
  auto* d_opt = app.add_option("--d", d, "dimension for pure and maxent");
  auto* j_opt = app.add_option("--j", j, "spin for spin scenarios, as \"3/2\" or \"1.5\"");
  auto* mode_opt = app.add_option("--mode", mode, "lagrangian | constrained | endpoints | verify | selftest");
  app.add_option("--grid-points,--grid_points", config.grid_points, "sweep size")->capture_default_str();
  app.add_option("--lambda-max,--lambda_max", config.lambda_max, "largest finite scalarization weight")
      ->capture_default_str();
  app.add_option("--g-list,--g_list", config.g_list, "comma-separated target G values")->delimiter(',');
  app.add_option("--samples", config.samples, "Monte Carlo samples for verify")->capture_default_str();
  app.add_option("--seed", config.seed, "random seed")->capture_default_str();
  app.add_option("--gap-tol,--gap_tol", config.gap_tol, "SDP duality gap tolerance")->capture_default_str();
  app.add_option("--feas-tol,--feas_tol", config.feas_tol, "SDP feasibility tolerance")->capture_default_str();
  app.add_option("--out,--out_path", config.out_path, "output file (default: standard output)");
  auto* format_opt = app.add_option("--format", format, "csv | json (default: from --out extension, else csv)");
  app.add_option("--threads", config.threads, "sweep worker threads; 0 = machine parallelism")
      ->capture_default_str();

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return {std::nullopt, app.exit(e, out, err) == 0 ? 0 : 1};
  }

  config.command = kCommands.at(command);
  if (d_opt->count() > 0) config.d = d;
  if (j_opt->count() > 0) config.j = j;
  if (mode_opt->count() > 0) {
    const auto it = kModes.find(mode);
    if (it == kModes.end()) throw ConfigError("unknown mode '" + mode + "'");
    config.mode = it->second;
  } else {
    config.mode = implied_mode(config.command);
  }
  if (format_opt->count() > 0) {
    const auto it = kFormats.find(format);
    if (it == kFormats.end()) throw ConfigError("unknown format '" + format + "'");
    config.format = it->second;
  } else {
    config.format = ends_with(config.out_path, ".json") ? Format::json : Format::csv;
  }
  return {config, 0};
}

void validate(const RunConfig& config) {
  const bool sweep = config.command == Command::curve;
  if (sweep && config.mode != Mode::lagrangian && config.mode != Mode::constrained)
    throw ConfigError("curve needs --mode lagrangian or constrained");
  if (!sweep && config.mode != implied_mode(config.command))
    throw ConfigError("--mode " + to_string(config.mode) + " does not match command " + to_string(config.command));
  if (config.command == Command::selftest) return;

  if (config.scenario.empty()) throw ConfigError("--scenario is required");
  if (config.scenario == "pure" || config.scenario == "maxent") {
    if (!config.d) throw ConfigError("scenario " + config.scenario + " needs --d");
    if (config.j) throw ConfigError("scenario " + config.scenario + " takes --d, not --j");
  } else if (config.scenario == "spin") {
    if (!config.j) throw ConfigError("scenario spin needs --j");
    if (config.d) throw ConfigError("scenario spin takes --j, not --d");
  } else {
    throw ConfigError("unknown scenario '" + config.scenario + "'");
  }
  if (sweep && config.grid_points < 2) throw ConfigError("--grid-points must be at least 2");
  if (!(config.lambda_max > 0.0) || !std::isfinite(config.lambda_max))
    throw ConfigError("--lambda-max must be positive and finite");
  if (!(config.gap_tol > 0.0) || !(config.feas_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (config.command == Command::verify && config.samples < 100) throw ConfigError("--samples must be at least 100");
  for (double g : config.g_list)
    if (!std::isfinite(g)) throw ConfigError("--g-list values must be finite");
}

Scenario make_scenario(const RunConfig& config) {
  try {
    if (config.scenario == "pure") return build_pure(config.d.value_or(0));
    if (config.scenario == "maxent") return build_maxent(config.d.value_or(0));
    if (config.scenario == "spin") return build_spin(Spin::parse(config.j.value_or("")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown scenario '" + config.scenario + "'");
}

std::string config_hash(const RunConfig& config) {
  // Output-only settings (path, format, threads) are left out.
  std::ostringstream canon;
  canon << to_string(config.command) << '|' << config.scenario << '|' << (config.d ? std::to_string(*config.d) : "")
        << '|' << config.j.value_or("") << '|' << to_string(config.mode) << '|' << config.grid_points << '|'
        << format_number(config.lambda_max) << '|';
  for (double g : config.g_list) canon << format_number(g) << ',';
  canon << '|' << config.samples << '|' << config.seed << '|' << format_number(config.gap_tol) << '|'
        << format_number(config.feas_tol);
  // 64-bit FNV-1a.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_csv(const RunConfig& config, const Scenario& s, const std::vector<TradeoffPoint>& points) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  const std::string param = s.parameter();
  for (const TradeoffPoint& p : points) {
    out << s.name() << ',' << param << ',' << lambda_field(p) << ',' << format_number(p.g) << ','
        << format_number(p.f) << ',' << format_number(p.diagnostics.duality_gap) << ','
        << format_number(p.diagnostics.primal_residual) << ',' << to_string(p.status) << ',' << config.seed << '\n';
  }
  return out.str();
}

std::string format_json(const RunConfig& config, const Scenario& s, const std::vector<TradeoffPoint>& points) {
  const std::string hash = config_hash(config);
  nlohmann::json doc;
  doc["config"] = config_json(config);
  doc["versions"] = {{"spec", "1.0"}};
  nlohmann::json rows = nlohmann::json::array();
  for (const TradeoffPoint& p : points) {
    nlohmann::json row;
    row["scenario"] = s.name();
    row["param"] = s.parameter();
    row["lambda"] = p.lambda ? number_or_null(*p.lambda) : nlohmann::json(nullptr);
    if (p.target_g) row["target_g"] = number_or_null(*p.target_g);
    row["G"] = number_or_null(p.g);
    row["F"] = number_or_null(p.f);
    row["status"] = std::string(to_string(p.status));
    row["duality_gap"] = number_or_null(p.diagnostics.duality_gap);
    row["primal_residual"] = number_or_null(p.diagnostics.primal_residual);
    row["min_eigenvalue"] = number_or_null(p.diagnostics.min_eigenvalue);
    row["iterations"] = p.diagnostics.iterations;
    row["message"] = p.diagnostics.message;
    row["seed"] = config.seed;
    row["config_hash"] = hash;
    if (p.verification) {
      const Verification& v = *p.verification;
      row["verification"] = {{"n_samples", v.n_samples},
                             {"f_estimate", v.f_estimate},
                             {"g_estimate", v.g_estimate},
                             {"f_stderr", v.f_stderr},
                             {"g_stderr", v.g_stderr},
                             {"consistent", verification_ok(p)}};
    }
    rows.push_back(std::move(row));
  }
  doc["points"] = std::move(rows);
  return doc.dump(2) + "\n";
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  validate(config);
  if (config.command == Command::selftest) return run_selftest(config.seed, out) == 0 ? 0 : 1;

  const Scenario s = make_scenario(config);
  std::ofstream file;
  if (!config.out_path.empty()) {
    file.open(config.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("cannot write output file '" + config.out_path + "'");
  }
  std::ostream& summary = config.out_path.empty() ? err : out;

  const std::vector<TradeoffPoint> points = compute_points(config, s);
  bool partial = false;
  for (const TradeoffPoint& p : points) {
    summary << summary_line(s, p) << '\n';
    if (!p.ok() || !verification_ok(p)) partial = true;
  }
  if (config.command == Command::endpoints && points.size() == 2) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "G_identity = %.12f\nG_max = %.12f\nF(G_max) = %.12f\n", identity_g(s),
                  points.back().g, points.back().f);
    summary << buf;
  }

  const std::string body =
      config.format == Format::json ? format_json(config, s, points) : format_csv(config, s, points);
  if (file.is_open()) {
    file << body;
    file.close();
    if (!file) throw ConfigError("failed writing output file '" + config.out_path + "'");
  } else {
    out << body;
  }
  return partial ? 2 : 0;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const ParseResult parsed = parse_args(argc, argv, out, err);
    if (!parsed.config) return parsed.exit_code;
    return run(*parsed.config, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qtradeoff::cli
