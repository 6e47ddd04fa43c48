// metasys: command-line driver for the model runtime.
//
// Exit codes: 0 success, 1 goal not met, 2 usage error, 3 toolchain error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "metasys/amp.hpp"
#include "metasys/cellular_automaton.hpp"
#include "metasys/codegen.hpp"
#include "metasys/error.hpp"
#include "metasys/neural_network.hpp"
#include "metasys/random.hpp"
#include "metasys/search.hpp"
#include "metasys/system.hpp"
#include "metasys/toolchain.hpp"

namespace {

using namespace metasys;

constexpr int kExitOk = 0;
constexpr int kExitGoalNotMet = 1;
constexpr int kExitUsage = 2;
constexpr int kExitToolchain = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string config;
  bool quiet = false;
  bool verbose = false;
  unsigned threads = 1;
};

struct CaRunArgs {
  long rule = -1;
  std::string init;
  std::size_t steps = 0;
};

struct CaSearchArgs {
  std::string init;
  std::string target;
  std::size_t steps = 0;
  long long budget = 1000;
  double threshold = 1.0;
  bool via_codegen = false;
  bool dedup = false;
  std::string toolchain;
  long timeout = 60;
};

struct AnnTrainArgs {
  std::size_t layers = 15;
  std::size_t width = 31;
  std::string input;
  std::string target;
  long long budget = 100000;
  long long epochs = 200;
  double rate = 0.1;
  std::string strategy = "output-layer-only";
  std::vector<std::string> layer_targets;
  double threshold = 0.9;
  std::string amp_out;
};

struct CodegenArgs {
  std::string amp;
  long rule = -1;
  std::string init;
  std::size_t steps = 0;
  std::string out;
  std::string amp_out;
  std::string backend = "cxx";
};

struct VerifyArgs {
  std::string amp;
  std::string toolchain;
  long timeout = 60;
};

/// Data sink: --output file or standard output.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::uint64_t resolve_seed(const Globals& g) {
  if (g.seed) return *g.seed;
  const std::uint64_t s = fresh_seed();
  std::cerr << "seed " << s << '\n';
  return s;
}

EntityTuple state_arg(const std::string& text, const char* flag) {
  try {
    return ca::parse_state(text);
  } catch (const Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

ToolchainConfig toolchain_arg(const std::string& flag_value, long timeout) {
  ToolchainConfig config;
  if (!flag_value.empty()) {
    config.command = flag_value;
  } else if (auto env = toolchain_from_env()) {
    config = *env;
  }
  config.timeout = std::chrono::seconds(timeout);
  return config;
}

int cmd_ca_run(const Globals& g, const CaRunArgs& a) {
  const auto initial = state_arg(a.init, "--init");
  if (initial.size() < 3) throw UsageError("--init needs at least 3 cells");
  const auto system = ca::make_system(ca::RuleNumber(a.rule), initial);
  Output out(g.output);
  auto& os = out.stream();
  run(system, a.steps, [&](const EntityTuple& s) { os << ca::format_state(s) << '\n'; });
  os.flush();
  return kExitOk;
}

search::SearchProblem problem_args(const std::string& init, const std::string& target,
                                   std::size_t steps, double threshold) {
  const auto i = state_arg(init, "--init");
  const auto t = state_arg(target, "--target");
  if (i.size() != t.size()) throw UsageError("--init and --target differ in length");
  if (i.size() < 3) throw UsageError("--init needs at least 3 cells");
  return search::make_problem(i, t, steps, threshold);
}

int cmd_ca_search(const Globals& g, const CaSearchArgs& a) {
  if (a.budget < 1) throw UsageError("--budget must be at least 1");
  auto problem = problem_args(a.init, a.target, a.steps, a.threshold);
  search::SearchOptions options;
  options.budget = static_cast<std::size_t>(a.budget);
  options.deduplicate = a.dedup;
  options.threads = g.threads;
  if (a.via_codegen) {
    options.route = search::Route::Codegen;
    options.toolchain = toolchain_arg(a.toolchain, a.timeout);
    validate(options.toolchain);
  }
  options.seed = resolve_seed(g);
  const auto report = search::random_rule_search(problem, options);
  Output out(g.output);
  out.stream() << search::format_report(report);
  out.stream().flush();
  if (g.verbose) std::cerr << "attempts " << report.attempts << '\n';
  return report.solved() ? kExitOk : kExitGoalNotMet;
}

int cmd_ca_enumerate(const Globals& g, const CaSearchArgs& a) {
  const auto problem = problem_args(a.init, a.target, a.steps, a.threshold);
  const auto solutions = search::exhaustive_rule_search(problem);
  Output out(g.output);
  for (unsigned r : solutions) out.stream() << r << '\n';
  out.stream() << "count " << solutions.size() << '\n';
  return kExitOk;
}

int cmd_ann_train(const Globals& g, const AnnTrainArgs& a) {
  if (a.budget < 1) throw UsageError("--budget must be at least 1");
  if (a.epochs < 1) throw UsageError("--epochs must be at least 1");
  if (a.rate < 0.0) throw UsageError("--rate must be >= 0");
  const auto input = state_arg(a.input, "--input");
  const auto target = state_arg(a.target, "--target");
  if (input.size() != a.width || target.size() != a.width) {
    throw UsageError("--input and --target must have --width (" + std::to_string(a.width) +
                     ") states");
  }
  auto topology = nn::layered_milieu(a.layers, a.width);

  nn::TrainingConfig config;
  config.rate = a.rate;
  config.epochs = static_cast<std::size_t>(a.epochs);
  config.budget = static_cast<std::size_t>(a.budget);
  config.threads = g.threads;
  if (a.strategy == "output-layer-only") {
    config.strategy = TrainingStrategy::OutputLayerOnly;
  } else if (a.strategy == "layerwise-targets") {
    config.strategy = TrainingStrategy::LayerwiseTargets;
    if (a.layer_targets.empty()) {
      config.layer_targets.assign(a.layers - 2, target);
    } else {
      for (const auto& t : a.layer_targets) config.layer_targets.push_back(state_arg(t, "--layer-target"));
      if (config.layer_targets.size() != a.layers - 2) {
        throw UsageError("--layer-target must be given once per hidden layer (" +
                         std::to_string(a.layers - 2) + ")");
      }
    }
  } else {
    throw UsageError("--strategy must be output-layer-only or layerwise-targets");
  }

  const std::uint64_t seed = resolve_seed(g);
  const auto report = nn::train(topology, input, target, config, seed);
  Output out(g.output);
  auto& os = out.stream();
  double best = 0.0;
  for (std::size_t k = 0; k < report.history.size(); ++k) {
    // Progress lines only when the best improves (budgets reach 1e5).
    if (k == 0 || report.history[k] > best) {
      best = report.history[k];
      os << "attempt " << k + 1 << " match " << format_decimal(report.history[k]) << " best "
         << format_decimal(best) << '\n';
    }
  }
  os << "best-match " << format_decimal(report.best_match) << " attempts " << report.attempts
     << '\n';
  os.flush();
  if (report.exact() && !g.quiet) {
    std::cerr << "note: exact match (1.0) reached on attempt " << report.best_attempt << '\n';
  }
  if (!a.amp_out.empty()) {
    const auto system = nn::to_system(report.best_network, input, Schedule::LayeredSweep,
                                      config.strategy);
    amp::write_file(a.amp_out, amp::emit(system, a.layers - 1));
  }
  return report.best_match >= a.threshold ? kExitOk : kExitGoalNotMet;
}

amp::AmpDocument load_amp(const std::string& path) {
  try {
    return amp::read_file(path);
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

int cmd_codegen(const Globals& g, const CodegenArgs& a) {
  amp::AmpDocument doc;
  if (!a.amp.empty()) {
    doc = load_amp(a.amp);
  } else {
    if (a.rule < 0 || a.init.empty()) {
      throw UsageError("codegen needs --amp or --rule and --init");
    }
    const auto initial = state_arg(a.init, "--init");
    if (initial.size() < 3) throw UsageError("--init needs at least 3 cells");
    doc = amp::emit(ca::make_system(ca::RuleNumber(a.rule), initial), a.steps);
  }
  const auto program = codegen::generate_source(doc, a.backend);
  if (!a.amp_out.empty()) amp::write_file(a.amp_out, doc);
  Output out(a.out.empty() ? g.output : a.out);
  out.stream() << program.text();
  return kExitOk;
}

int cmd_verify(const Globals& g, const VerifyArgs& a) {
  const auto doc = load_amp(a.amp);
  const auto config = toolchain_arg(a.toolchain, a.timeout);
  validate(config);
  const auto verdict = verify_equivalence(doc, config);
  Output out(g.output);
  if (verdict.equal) {
    out.stream() << "equal\n";
    return kExitOk;
  }
  out.stream() << "mismatch step " << verdict.step << '\n';
  if (!g.quiet) {
    std::cerr << "interpreter: " << verdict.expected << "\ncompiled:    " << verdict.actual << '\n';
  }
  return kExitGoalNotMet;
}

std::string milieu_summary(const OperationalParameters& op) {
  std::size_t lo = op.milieu_sizes.empty() ? 0 : op.milieu_sizes.front();
  std::size_t hi = lo;
  for (std::size_t q : op.milieu_sizes) {
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  std::ostringstream s;
  s << (op.milieu.kind() == MilieuKind::Weighted ? "weighted" : "boolean") << " links "
    << op.milieu.link_count() << " q " << lo;
  if (hi != lo) s << ".." << hi;
  return s.str();
}

int cmd_demodulate(const Globals& g, const std::string& path) {
  const auto doc = load_amp(path);
  Demodulated d;
  try {
    d = demodulate(amp::to_system(doc));
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
  Output out(g.output);
  auto& os = out.stream();
  os << "structural\n"
     << "  p " << d.structural.entities << '\n'
     << "  states " << to_string(d.structural.states) << '\n'
     << "  init " << format_state_line(d.structural.initial) << '\n';
  os << "operational\n"
     << "  kind " << amp::to_string(doc.kind) << '\n';
  if (const auto* table = std::get_if<RuleTable>(&d.operational.phi)) {
    os << "  update table rule " << table->number() << '\n';
    for (unsigned b = 0; b < 8; ++b) {
      os << "    phi(" << (b >> 2 & 1U) << ',' << (b >> 1 & 1U) << ',' << (b & 1U)
         << ") = " << unsigned{table->outputs[b]} << '\n';
    }
  } else {
    const auto& rule = std::get<PerceptronRule>(d.operational.phi);
    os << "  update perceptron width " << rule.width << " layers "
       << d.structural.entities / rule.width << " biases " << rule.bias.size() << " strategy "
       << to_string(rule.strategy) << '\n';
  }
  os << "  milieu " << milieu_summary(d.operational) << '\n'
     << "  boundary " << to_string(d.operational.boundary) << '\n'
     << "  schedule " << to_string(d.operational.schedule) << '\n'
     << "  steps " << doc.steps << '\n';
  return kExitOk;
}

/// Reads `key value` lines (# comments) from a config file.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> items;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    std::string value;
    std::getline(ss >> std::ws, value);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t' || value.back() == '\r')) {
      value.pop_back();
    }
    if (value.empty()) {
      throw UsageError(path + ":" + std::to_string(number) + ": key '" + key + "' has no value");
    }
    items.emplace_back(key, value);
  }
  return items;
}

/// Splices config-file entries into argv ahead of the user's own flags, so
/// that command-line flags win (options keep their last value).
std::vector<std::string> apply_config(const CLI::App& app, std::vector<std::string> args) {
  std::string config_path;
  std::size_t sub_pos = args.size();
  for (std::size_t k = 1; k < args.size(); ++k) {
    const std::string& a = args[k];
    if (a == "--config" && k + 1 < args.size()) {
      config_path = args[k + 1];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else if (sub_pos == args.size() && app.get_subcommand_no_throw(a) != nullptr) {
      sub_pos = k;
    }
  }
  if (config_path.empty()) return args;

  const CLI::App* sub = sub_pos < args.size() ? app.get_subcommand_no_throw(args[sub_pos]) : nullptr;
  std::vector<std::string> global_args;
  std::vector<std::string> sub_args;
  for (const auto& [key, value] : read_config(config_path)) {
    const std::string flag = "--" + key;
    if (key == "config") throw UsageError("config files cannot include other config files");
    if (app.get_option_no_throw(flag) != nullptr) {
      global_args.push_back(flag + "=" + value);
    } else if (sub != nullptr && sub->get_option_no_throw(flag) != nullptr) {
      sub_args.push_back(flag + "=" + value);
    } else {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
  std::vector<std::string> out(args.begin(), args.begin() + 1);
  out.insert(out.end(), global_args.begin(), global_args.end());
  const std::size_t stop = std::min(sub_pos + 1, args.size());
  out.insert(out.end(), args.begin() + 1, args.begin() + static_cast<std::ptrdiff_t>(stop));
  out.insert(out.end(), sub_args.begin(), sub_args.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(stop), args.end());
  return out;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NoBackendConfigured:
    case ErrorCode::CompileFailed:
    case ErrorCode::RunFailed:
    case ErrorCode::RunTimeout:
    case ErrorCode::OutputParseError:
      return kExitToolchain;
    default:
      return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metamodel runtime: cellular automata, perceptron networks, rule search and "
               "model program generation"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for randomized commands (printed to stderr if omitted)");
  app.add_option("-o,--output", g.output, "Write data to this file instead of stdout");
  app.add_option("--config", g.config, "Config file of 'flag value' lines; flags override it");
  app.add_option("--threads", g.threads, "Worker threads for search and training")
      ->check(CLI::Range(1U, 256U));
  app.add_flag("-q,--quiet", g.quiet, "Suppress notes on stderr");
  app.add_flag("-v,--verbose", g.verbose, "Extra diagnostics on stderr");

  CaRunArgs run_args;
  auto* ca_run = app.add_subcommand("ca-run", "Run an elementary CA on a periodic ring");
  ca_run->add_option("--rule", run_args.rule, "Wolfram rule number")->required();
  ca_run->add_option("--init", run_args.init, "Initial state as a 0/1 string")->required();
  ca_run->add_option("--steps", run_args.steps, "Number of time steps")->required();

  CaSearchArgs search_args;
  auto* ca_search = app.add_subcommand("ca-search", "Random search for a rule reaching a target");
  ca_search->add_option("--init", search_args.init)->required();
  ca_search->add_option("--target", search_args.target)->required();
  ca_search->add_option("--steps", search_args.steps)->required();
  ca_search->add_option("--budget", search_args.budget, "Maximum attempts")->capture_default_str();
  ca_search->add_option("--threshold", search_args.threshold, "Required match in (0, 1]")
      ->capture_default_str();
  ca_search->add_flag("--via-codegen", search_args.via_codegen,
                      "Generate, compile and run a program per attempt");
  ca_search->add_flag("--dedup", search_args.dedup, "Draw rules without replacement");
  ca_search->add_option("--toolchain", search_args.toolchain,
                        "Build command template with {src} and {bin}");
  ca_search->add_option("--timeout", search_args.timeout, "Seconds per build/run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CaSearchArgs enum_args;
  auto* ca_enum = app.add_subcommand("ca-enumerate", "List every rule reaching a target");
  ca_enum->add_option("--init", enum_args.init)->required();
  ca_enum->add_option("--target", enum_args.target)->required();
  ca_enum->add_option("--steps", enum_args.steps)->required();
  ca_enum->add_option("--threshold", enum_args.threshold)->capture_default_str();

  AnnTrainArgs ann;
  auto* ann_train = app.add_subcommand("ann-train", "Train a layered perceptron network");
  ann_train->add_option("--layers", ann.layers)->capture_default_str();
  ann_train->add_option("--width", ann.width)->capture_default_str();
  ann_train->add_option("--input", ann.input, "Input layer as a 0/1 string")->required();
  ann_train->add_option("--target", ann.target, "Target output as a 0/1 string")->required();
  ann_train->add_option("--budget", ann.budget, "Maximum attempts")->capture_default_str();
  ann_train->add_option("--epochs", ann.epochs, "Epochs per attempt")->capture_default_str();
  ann_train->add_option("--rate", ann.rate, "Learning rate")->capture_default_str();
  ann_train->add_option("--strategy", ann.strategy, "output-layer-only | layerwise-targets")
      ->capture_default_str();
  ann_train->add_option("--layer-target", ann.layer_targets,
                        "Hidden-layer target (repeat per hidden layer)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  ann_train->add_option("--threshold", ann.threshold, "Match needed for exit status 0")
      ->capture_default_str();
  ann_train->add_option("--amp-out", ann.amp_out, "Write the best network as an AMP document");

  CodegenArgs cg;
  auto* codegen_cmd = app.add_subcommand("codegen", "Generate a standalone model program");
  codegen_cmd->add_option("--amp", cg.amp, "AMP document");
  codegen_cmd->add_option("--rule", cg.rule, "CA rule (instead of --amp)");
  codegen_cmd->add_option("--init", cg.init, "CA initial state (instead of --amp)");
  codegen_cmd->add_option("--steps", cg.steps, "CA steps (instead of --amp)");
  codegen_cmd->add_option("--out", cg.out, "Program text destination");
  codegen_cmd->add_option("--amp-out", cg.amp_out, "Also write the AMP document");
  codegen_cmd->add_option("--backend", cg.backend)->capture_default_str();

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Compare interpreter and compiled trajectories");
  verify_cmd->add_option("--amp", va.amp, "AMP document")->required();
  verify_cmd->add_option("--toolchain", va.toolchain,
                         std::string("Build command template (default: $") + kToolchainEnv + ")");
  verify_cmd->add_option("--timeout", va.timeout, "Seconds per build/run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string demod_path;
  auto* demod = app.add_subcommand("demodulate", "Split an AMP model into its parameters");
  demod->add_option("--amp", demod_path, "AMP document")->required();

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = apply_config(app, std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);

    if (*ca_run) return cmd_ca_run(g, run_args);
    if (*ca_search) return cmd_ca_search(g, search_args);
    if (*ca_enum) return cmd_ca_enumerate(g, enum_args);
    if (*ann_train) return cmd_ann_train(g, ann);
    if (*codegen_cmd) return cmd_codegen(g, cg);
    if (*verify_cmd) return cmd_verify(g, va);
    if (*demod) return cmd_demodulate(g, demod_path);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ToolchainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitToolchain;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
