#pragma once

// Shared helpers for unit and acceptance tests: corpus access, temporary
// directories, and synthetic backend output.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "compver/pipeline.hpp"
#include "compver/program_model.hpp"
#include "compver/subprocess.hpp"
#include "compver/verifier.hpp"

namespace compver::testing {

inline std::filesystem::path corpus_dir() { return COMPVER_CORPUS_DIR; }
inline std::filesystem::path mock_backend() { return COMPVER_MOCK_BACKEND; }
inline std::filesystem::path cli_binary() { return COMPVER_CLI; }

inline std::string corpus_text(const std::string& name) { return read_file(corpus_dir() / name); }
inline ProgramModel corpus_model(const std::string& name) { return parse_program(corpus_text(name)); }

inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir()))
    if (e.path().extension() == ".c") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "compver-test-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string pass_output() { return "Parsing input.c\nVERIFICATION SUCCESSFUL\n"; }

struct StepSpec {
  std::string function;
  unsigned line = 1;
  std::vector<std::pair<std::string, std::string>> assignments;
};

/// Backend-style failure report with a counterexample trace.
inline std::string fail_output(const std::string& property, const std::string& function,
                               const std::vector<StepSpec>& steps, const std::string& comment = "assertion") {
  std::string out = "Counterexample:\n\n";
  unsigned n = 1;
  for (const auto& s : steps) {
    out += "State " + std::to_string(n++) + " file input.c line " + std::to_string(s.line) + " column 3 function " +
           s.function + " thread 0\n----------------------------------------------------\n";
    for (const auto& [k, v] : s.assignments) out += "  " + k + " = " + v + "\n";
    out += "\n";
  }
  out += "Violated property:\n  file input.c line 9 column 5 function " + function + "\n  " + comment + "\n  " +
         property + "\n\nVERIFICATION FAILED\n";
  return out;
}

/// Runs the pipeline in-process with scripted replies from `rules`, saving
/// every answer of `inner` as a mock-backend fixture under `dir`.
inline PipelineResult record_run(const ProgramModel& m, const PipelineConfig& cfg, const nlohmann::json& rules,
                                 Verifier& inner, const std::filesystem::path& dir) {
  auto client = ScriptedLlmClient::from_json(rules);
  RecordingVerifier rec(inner, dir);
  return run_pipeline(m, cfg, client, rec);
}

inline ProcessResult run_cli(std::vector<std::string> args,
                             std::chrono::milliseconds limit = std::chrono::milliseconds(60'000)) {
  args.insert(args.begin(), cli_binary().string());
  return run_process(args, limit);
}

}  // namespace compver::testing
