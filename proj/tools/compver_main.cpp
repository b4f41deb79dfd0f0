// compver: verify one C program, or a directory of them, by synthesizing and
// refining function contracts around a bounded model checker.
//
// Exit status: 0 all converged, 1 something did not converge, 2 usage or
// configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compver/harness.hpp"

namespace fs = std::filesystem;
using namespace compver;

namespace {

struct Options {
  std::string strategy = "smart-ice";
  std::optional<std::size_t> max_iterations;
  std::optional<double> timeout_s;
  std::string profile = "default";
  std::size_t workers = 1;
  std::string backend = "esbmc";
  std::vector<std::string> backend_flags;
  std::string llm = "live";
  std::string transcripts;
  std::string script;
  std::string templates;
  std::string report;
  std::string weights;
  std::optional<double> tau;
  bool no_timing = false;
  bool with_log = false;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

HarnessConfig harness_config(const Options& o) {
  HarnessConfig cfg = o.profile == "verifythis" ? HarnessConfig::verifythis_profile() : HarnessConfig{};
  auto strategy = strategy_from_string(o.strategy);
  if (!strategy) throw ConfigError("unknown strategy: " + o.strategy);
  cfg.pipeline.strategy = *strategy;
  if (o.max_iterations) {
    cfg.pipeline.k_cegar = *o.max_iterations;
    cfg.pipeline.k_cegis = *o.max_iterations;
    cfg.pipeline.total_budget = 2 * *o.max_iterations;
  }
  if (o.timeout_s) cfg.pipeline.timeout_s = *o.timeout_s;
  if (o.tau) cfg.pipeline.tau = *o.tau;
  cfg.pipeline.workers = o.workers;
  if (!o.weights.empty()) {
    try {
      cfg.weights = WeightTable::load(o.weights);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("weights: ") + e.what());
    }
  }
  return cfg;
}

nlohmann::json load_json(const fs::path& p) {
  try {
    return nlohmann::json::parse(read_file(p));
  } catch (const std::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

// Scripted replies come from --script: a rules file, or a directory holding
// `<program stem>.json` per program.
StackFactory make_stacks(const Options& o, const HarnessConfig& cfg) {
  VerifierConfig vcfg;
  vcfg.backend_path = o.backend;
  vcfg.extra_flags = o.backend_flags;
  vcfg.timeout_s = cfg.pipeline.timeout_s;
  try {
    BackendVerifier probe(vcfg);
  } catch (const BackendNotFound& e) {
    throw ConfigError(e.what());
  }

  std::shared_ptr<const PromptTemplates> templates;
  if (!o.templates.empty()) {
    try {
      templates = std::make_shared<const PromptTemplates>(PromptTemplates::load(o.templates));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("templates: ") + e.what());
    }
  }

  std::shared_ptr<TranscriptStore> store;
  if (!o.transcripts.empty()) store = std::make_shared<TranscriptStore>(o.transcripts);

  std::function<std::shared_ptr<LlmClient>(const fs::path&)> client;
  if (o.llm == "scripted") {
    if (o.script.empty()) throw ConfigError("--llm scripted needs --script");
    const fs::path script = o.script;
    const bool per_program = fs::is_directory(script);
    std::optional<nlohmann::json> shared;
    if (!per_program) shared = load_json(script);
    client = [=](const fs::path& program) -> std::shared_ptr<LlmClient> {
      auto rules = per_program ? load_json(script / (program.stem().string() + ".json")) : *shared;
      return std::shared_ptr<LlmClient>(new ScriptedLlmClient(ScriptedLlmClient::from_json(rules)));
    };
  } else if (o.llm == "replay") {
    if (!store) throw ConfigError("--llm replay needs --transcripts");
    client = [store](const fs::path&) { return std::make_shared<ReplayLlmClient>(store); };
  } else if (o.llm == "live") {
    std::shared_ptr<LlmClient> live;
    try {
      live = std::make_shared<LiveLlmClient>(LiveClientConfig::from_env());
    } catch (const ClientUnavailable& e) {
      throw ConfigError(e.what());
    }
    client = [store, live](const fs::path&) -> std::shared_ptr<LlmClient> {
      if (store) return std::make_shared<ReplayLlmClient>(store, live);
      return live;
    };
  } else {
    throw ConfigError("unknown --llm mode: " + o.llm);
  }

  return [=](const fs::path& program) {
    return Stack{client(program), std::make_shared<BackendVerifier>(vcfg), templates};
  };
}

void write_report(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  write_file_atomic(path, j.dump(2) + "\n");
}

int cmd_verify(const Options& o, const std::string& file) {
  auto cfg = harness_config(o);
  auto stacks = make_stacks(o, cfg);
  if (!fs::is_regular_file(file)) throw ConfigError("not a readable file: " + file);
  auto rep = run_program(file, cfg, stacks);
  auto j = to_json_value(rep, !o.no_timing, o.with_log);
  std::cout << j.dump(2) << "\n";
  write_report(o.report, j);
  return rep.outcome == RunOutcome::converged ? 0 : 1;
}

int cmd_suite(const Options& o, const std::string& dir) {
  auto cfg = harness_config(o);
  auto stacks = make_stacks(o, cfg);
  SuiteReport suite;
  try {
    suite = run_suite(dir, cfg, o.workers, stacks);
  } catch (const EmptySuite& e) {
    throw ConfigError(e.what());
  }
  std::cout << summary_table(suite);
  write_report(o.report.empty() ? std::string("compver-report.json") : o.report, to_json_value(suite, !o.no_timing));
  return suite.all_converged() ? 0 : 1;
}

void add_common(CLI::App& app, Options& o) {
  app.add_option("--strategy", o.strategy, "smart-ice, no-ice or pre-abstraction")
      ->check(CLI::IsMember({"smart-ice", "no-ice", "pre-abstraction", "smart_ice", "no_ice", "pre_abstraction"}));
  app.add_option("--max-iterations", o.max_iterations, "per-stage iteration limit (CEGAR and CEGIS each)")
      ->check(CLI::PositiveNumber);
  app.add_option("--timeout-s", o.timeout_s, "per-program wall-clock limit")->check(CLI::PositiveNumber);
  app.add_option("--profile", o.profile, "default (600 s) or verifythis (900 s)")
      ->check(CLI::IsMember({"default", "verifythis"}));
  app.add_option("--workers", o.workers, "concurrent programs and synthesis calls")->check(CLI::PositiveNumber);
  app.add_option("--backend", o.backend, "model checker executable");
  app.add_option("--backend-flag", o.backend_flags, "extra backend argument (repeatable)")->allow_extra_args(false);
  app.add_option("--llm", o.llm, "live, replay or scripted")->check(CLI::IsMember({"live", "replay", "scripted"}));
  app.add_option("--transcripts", o.transcripts, "LLM transcript directory");
  app.add_option("--script", o.script, "scripted replies: rules file or per-program directory");
  app.add_option("--templates", o.templates, "prompt template override directory");
  app.add_option("--report", o.report, "write the JSON report here");
  app.add_option("--weights", o.weights, "complexity weight file (key = value lines)");
  app.add_option("--tau", o.tau, "pre-abstraction score threshold")->check(CLI::NonNegativeNumber);
  app.add_flag("--no-timing", o.no_timing, "omit wall-clock fields from reports");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compositional verification with synthesized function contracts"};
  app.require_subcommand(1);
  Options opts;
  std::string target;

  auto* verify = app.add_subcommand("verify", "verify one program");
  verify->add_option("file", target, "C source")->required();
  verify->add_flag("--log", opts.with_log, "include the run log in the report");
  add_common(*verify, opts);

  auto* suite = app.add_subcommand("suite", "verify every .c file of a directory");
  suite->add_option("dir", target, "program directory")->required();
  add_common(*suite, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) return cmd_verify(opts, target);
    return cmd_suite(opts, target);
  } catch (const ConfigError& e) {
    std::cerr << "compver: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "compver: " << e.what() << "\n";
    return 2;
  }
}
