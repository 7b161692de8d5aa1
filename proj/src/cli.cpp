#include "agielo/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "agielo/analysis.hpp"
#include "agielo/engine.hpp"
#include "agielo/errors.hpp"
#include "agielo/synthetic.hpp"
#include "json.hpp"

namespace agielo {
namespace {

namespace fs = std::filesystem;

enum class LogLevel { kOff, kError, kWarn, kInfo, kDebug };

LogLevel log_level_from_env() {
  const char* v = std::getenv("AGIELO_LOG");
  if (!v) return LogLevel::kWarn;
  std::string s(v);
  if (s == "off") return LogLevel::kOff;
  if (s == "error") return LogLevel::kError;
  if (s == "info") return LogLevel::kInfo;
  if (s == "debug") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err), level_(log_level_from_env()) {}

  void warn(const std::string& msg) const { emit(LogLevel::kWarn, "warn", msg); }
  void info(const std::string& msg) const { emit(LogLevel::kInfo, "info", msg); }
  void debug(const std::string& msg) const {
    emit(LogLevel::kDebug, "debug", msg);
  }

 private:
  void emit(LogLevel at, const char* tag, const std::string& msg) const {
    if (level_ >= at) err_ << "agielo: " << tag << ": " << msg << '\n';
  }
  std::ostream& err_;
  LogLevel level_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << content;
  if (!out) throw FormatError("failed writing '" + path + "'");
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad threshold '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("bad threshold '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("no thresholds given");
  return out;
}

/// Flags shared by the rating subcommands. Empty means "not given".
struct SharedFlags {
  std::string seed;
  std::string variant;
  std::string scoring;
  std::string checkpoints;
  std::string passes;
  double bin_width = kDefaultBinWidth;
};

void add_rating_flags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--seed", f.seed, "64-bit shuffle seed");
  cmd->add_option("--variant", f.variant, "standard | paper-literal");
  cmd->add_option("--scoring", f.scoring, "scoring function registry id");
  cmd->add_option("--checkpoints", f.checkpoints,
                  "comma-separated match percentages");
  cmd->add_option("--passes", f.passes, "passes over the matrix");
}

void apply_flags(const SharedFlags& f, RunSettings& s) {
  if (!f.seed.empty()) {
    std::istringstream in("seed=" + f.seed);
    s.config.seed = parse_run_settings(in).config.seed;
  }
  if (!f.passes.empty()) {
    std::istringstream in("passes=" + f.passes);
    s.config.passes = parse_run_settings(in).config.passes;
  }
  if (!f.variant.empty()) {
    try {
      s.config.constants.variant = parse_variant(f.variant.c_str());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (!f.scoring.empty()) {
    try {
      make_scoring_function(f.scoring);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    s.scoring = f.scoring;
  }
  if (!f.checkpoints.empty()) {
    s.config.checkpoints = parse_checkpoint_list(f.checkpoints);
  }
  s.config.validate();
}

ScoringFunction scoring_for(const std::string& id) {
  try {
    return make_scoring_function(id);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// --- rate -------------------------------------------------------------------

struct RateArgs {
  std::string input;
  std::string config;
  std::string output;
  SharedFlags flags;
};

int cmd_rate(const RateArgs& args, std::ostream& out, const Log& log) {
  RunSettings settings;
  if (!args.config.empty()) {
    std::ifstream in(args.config);
    if (!in) throw FormatError("cannot open config '" + args.config + "'");
    settings = parse_run_settings(in);
  }
  apply_flags(args.flags, settings);

  auto matrix = load_score_matrix_file(args.input, settings.scoring);
  log.info("loaded " + std::to_string(matrix.n_cases()) + " cases x " +
           std::to_string(matrix.n_agents()) + " agents");
  const auto result = run_ratings(matrix, settings.config);
  write_file(args.output,
             run_to_json(matrix, settings.config, result, args.input));
  out << "agents=" << matrix.n_agents() << " cases=" << matrix.n_cases()
      << " matches=" << result.matches_played
      << " seed=" << settings.config.seed << '\n';
  return kExitOk;
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::string run;
  std::string thresholds = "0.5,0.9,0.99";
  std::string output;
  std::string matrix;
  std::string scoring;
  std::string percentile_out;
  std::string histogram_out;
  double bin_width = kDefaultBinWidth;
};

std::string sibling_path(const std::string& output, const std::string& suffix) {
  fs::path p(output);
  auto stem = p.stem().string();
  return (p.parent_path() / (stem + suffix)).string();
}

std::string resolve_matrix(const AnalyzeArgs& args, const RunDocument& doc) {
  if (!args.matrix.empty()) return args.matrix;
  const auto& input = doc.metadata.input;
  if (input.empty()) return {};
  if (fs::exists(input)) return input;
  auto beside = fs::path(args.run).parent_path() / input;
  if (fs::exists(beside)) return beside.string();
  return {};
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, const Log& log) {
  if (!(args.bin_width > 0.0)) throw ConfigError("--bin-width must be > 0");
  const auto thresholds = parse_thresholds(args.thresholds);
  const auto doc = run_from_json(read_file(args.run));
  const auto fn =
      scoring_for(args.scoring.empty() ? doc.metadata.scoring : args.scoring);

  std::vector<double> case_ratings;
  for (const auto& p : doc.players) {
    if (p.category == Category::kTestCase) case_ratings.push_back(p.rating.mu);
  }
  if (case_ratings.empty()) throw FormatError("run contains no test cases");

  GapReport gaps;
  try {
    gaps = compute_gap_report(doc.players, thresholds, fn);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }

  std::optional<ReliabilityReport> reliability;
  if (auto path = resolve_matrix(args, doc); !path.empty()) {
    const auto matrix = load_score_matrix_file(path, fn.id());
    try {
      reliability = consistency_report(matrix, doc.players, fn, args.bin_width,
                                       doc.snapshots);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("reliability: ") + e.what());
    }
  } else {
    log.warn("no score matrix available; reliability report skipped");
  }

  write_file(args.output, report_to_json(gaps, reliability ? &*reliability
                                                           : nullptr,
                                         fn.metric_name()));
  {
    const auto path = args.percentile_out.empty()
                          ? sibling_path(args.output, "_percentile.csv")
                          : args.percentile_out;
    std::ostringstream csv;
    write_percentile_csv(csv, PercentileCurve(case_ratings));
    write_file(path, csv.str());
  }
  {
    const auto path = args.histogram_out.empty()
                          ? sibling_path(args.output, "_histogram.csv")
                          : args.histogram_out;
    std::ostringstream csv;
    write_histogram_csv(csv, rating_histogram(doc.players, args.bin_width));
    write_file(path, csv.str());
  }

  out << "r_t_max=" << fixed(gaps.r_t_max, 1)
      << " r_a_max=" << fixed(gaps.r_a_max, 1)
      << " expected_metric=" << fixed(gaps.expected_metric, 6);
  for (const auto& g : gaps.gaps) {
    out << " gap@" << g.confidence << '=' << fixed(g.gap, 1);
  }
  out << '\n';
  if (reliability) {
    out << "rho_t=" << fixed(reliability->rho_t, 6)
        << " rho_a=" << fixed(reliability->rho_a, 6)
        << " mae=" << fixed(reliability->mae, 6)
        << " mse=" << fixed(reliability->mse, 6) << '\n';
  }
  return kExitOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  long long agents = 20;
  long long cases = 5000;
  std::string mode = "binary";
  std::uint64_t seed = 0;
  double prior_mu = 1500.0;
  double prior_sigma = 350.0;
  bool recover = false;
  std::string output_dir;
  SharedFlags flags;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, const Log& log) {
  if (args.agents < 2 || args.cases < 2) {
    throw ConfigError("--agents and --cases must be at least 2");
  }
  PopulationSpec spec;
  spec.n_agents = static_cast<std::size_t>(args.agents);
  spec.n_cases = static_cast<std::size_t>(args.cases);
  spec.prior_mu = args.prior_mu;
  spec.prior_sigma = args.prior_sigma;
  spec.seed = args.seed;
  try {
    spec.outcome_mode = parse_outcome_mode(args.mode);
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  std::error_code ec;
  fs::create_directories(args.output_dir, ec);
  if (ec) throw FormatError("cannot create '" + args.output_dir + "'");
  const fs::path dir(args.output_dir);

  const auto population = sample_population(spec);
  {
    std::ostringstream csv;
    write_score_matrix(csv, simulate_matrix(population, spec));
    write_file((dir / "matrix.csv").string(), csv.str());
  }
  write_file((dir / "truth.json").string(), truth_to_json(population));
  log.info("wrote " + (dir / "matrix.csv").string());

  out << "agents=" << spec.n_agents << " cases=" << spec.n_cases
      << " mode=" << outcome_mode_name(spec.outcome_mode)
      << " seed=" << spec.seed << '\n';
  if (!args.recover) return kExitOk;

  RunSettings settings;
  settings.config.seed = spec.seed;
  apply_flags(args.flags, settings);
  const auto matrix =
      load_score_matrix_file((dir / "matrix.csv").string(), settings.scoring);
  const auto result = run_ratings(matrix, settings.config);
  write_file((dir / "run.json").string(),
             run_to_json(matrix, settings.config, result, "matrix.csv"));

  const auto fn = scoring_for(settings.scoring);
  const auto recovery = recovery_report(population, result.players);
  const auto reliability = consistency_report(
      matrix, result.players, fn, args.flags.bin_width, result.snapshots);

  nlohmann::ordered_json doc;
  auto r6 = [](double x) { return std::round(x * 1e6) / 1e6; };
  doc["mode"] = outcome_mode_name(spec.outcome_mode);
  doc["seed"] = spec.seed;
  doc["rho_agents"] = r6(recovery.rho_agents);
  doc["rho_cases"] = r6(recovery.rho_cases);
  doc["mean_abs_mu_error"] = r6(recovery.mean_abs_mu_error);
  doc["consistency"] = {{"rho_t", r6(reliability.rho_t)},
                        {"rho_a", r6(reliability.rho_a)},
                        {"mae", r6(reliability.mae)},
                        {"mse", r6(reliability.mse)},
                        {"bin_width", reliability.bin_width}};
  write_file((dir / "recovery.json").string(), doc.dump(1) + "\n");

  out << "rho_agents=" << fixed(recovery.rho_agents, 6)
      << " rho_cases=" << fixed(recovery.rho_cases, 6)
      << " rho_t=" << fixed(reliability.rho_t, 6)
      << " rho_a=" << fixed(reliability.rho_a, 6) << '\n';
  return kExitOk;
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string run;
  std::string agent;
  std::string test_case;
  std::optional<double> rating;
  std::string scoring;
};

const Player& find_player(const RunDocument& doc, const std::string& id,
                          Category category) {
  for (const auto& p : doc.players) {
    if (p.id == id && p.category == category) return p;
  }
  throw FormatError(std::string("unknown ") + category_name(category) +
                    " id '" + id + "'");
}

int cmd_predict(const PredictArgs& args, std::ostream& out) {
  const auto doc = run_from_json(read_file(args.run));
  const auto fn =
      scoring_for(args.scoring.empty() ? doc.metadata.scoring : args.scoring);
  const double r_agent = find_player(doc, args.agent, Category::kAgent).rating.mu;
  double r_case = 0.0;
  if (args.rating) {
    r_case = *args.rating;
  } else if (!args.test_case.empty()) {
    r_case = find_player(doc, args.test_case, Category::kTestCase).rating.mu;
  } else {
    throw ConfigError("predict needs --case or --rating");
  }
  const double expected = elo_expected_score(r_agent, r_case);
  out << "predicted_metric=" << fixed(predict_metric(r_agent, r_case, fn), 6)
      << " expected_score=" << fixed(expected, 6) << '\n';
  return kExitOk;
}

void report_error(std::ostream& err, int code, const std::string& message) {
  std::string line = message;
  for (char& ch : line) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  err << "agielo: error[" << code << "]: " << line << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Joint difficulty and competency ratings for benchmark results",
               "agielo"};
  app.require_subcommand(1);

  RateArgs rate;
  auto* rate_cmd = app.add_subcommand("rate", "rate agents and test cases");
  rate_cmd->add_option("input", rate.input, "score matrix CSV")->required();
  rate_cmd->add_option("-c,--config", rate.config, "key = value settings file");
  rate_cmd->add_option("-o,--output", rate.output, "run JSON path")->required();
  add_rating_flags(rate_cmd, rate.flags);

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "gap and reliability reports");
  analyze_cmd->add_option("run", analyze.run, "run JSON")->required();
  analyze_cmd->add_option("-t,--thresholds", analyze.thresholds,
                          "comma-separated confidences in (0,1)");
  analyze_cmd->add_option("-o,--output", analyze.output, "report JSON path")
      ->required();
  analyze_cmd->add_option("--matrix", analyze.matrix,
                          "score matrix CSV (defaults to the run's input)");
  analyze_cmd->add_option("--scoring", analyze.scoring,
                          "override the run's scoring function");
  analyze_cmd->add_option("--bin-width", analyze.bin_width, "rating points");
  analyze_cmd->add_option("--percentile-out", analyze.percentile_out);
  analyze_cmd->add_option("--histogram-out", analyze.histogram_out);

  SimulateArgs simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "synthetic ground-truth runs");
  sim_cmd->add_option("--agents", simulate.agents);
  sim_cmd->add_option("--cases", simulate.cases);
  sim_cmd->add_option("--mode", simulate.mode, "binary | continuous");
  sim_cmd->add_option("--seed", simulate.seed);
  sim_cmd->add_option("--prior-mu", simulate.prior_mu);
  sim_cmd->add_option("--prior-sigma", simulate.prior_sigma);
  sim_cmd->add_flag("--recover", simulate.recover,
                    "rate the simulated matrix and score the recovery");
  sim_cmd->add_option("-o,--output-dir", simulate.output_dir)->required();
  sim_cmd->add_option("--variant", simulate.flags.variant);
  sim_cmd->add_option("--checkpoints", simulate.flags.checkpoints);
  sim_cmd->add_option("--passes", simulate.flags.passes);
  sim_cmd->add_option("--bin-width", simulate.flags.bin_width);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "expected metric for a pair");
  predict_cmd->add_option("run", predict.run, "run JSON")->required();
  predict_cmd->add_option("--agent", predict.agent)->required();
  auto* case_opt = predict_cmd->add_option("--case", predict.test_case);
  auto* rating_opt = predict_cmd->add_option("--rating", predict.rating);
  case_opt->excludes(rating_opt);
  predict_cmd->add_option("--scoring", predict.scoring);

  const Log log(err);
  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      report_error(err, kExitUsage, e.what());
      return kExitUsage;
    }
    if (rate_cmd->parsed()) return cmd_rate(rate, out, log);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze, out, log);
    if (sim_cmd->parsed()) return cmd_simulate(simulate, out, log);
    if (predict_cmd->parsed()) return cmd_predict(predict, out);
    report_error(err, kExitUsage, "no subcommand");
    return kExitUsage;
  } catch (const ConfigError& e) {
    report_error(err, kExitUsage, e.what());
    return kExitUsage;
  } catch (const FormatError& e) {
    report_error(err, kExitData, e.what());
    return kExitData;
  } catch (const std::domain_error& e) {
    report_error(err, kExitDomain, e.what());
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    report_error(err, kExitUsage, e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    report_error(err, kExitData, e.what());
    return kExitData;
  }
}

}  // namespace agielo
