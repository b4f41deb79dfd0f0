#pragma once

// Driving the model-checker backend: system checks (contracts replace calls)
// and function checks (one contract enforced), output parsing, and the
// scripted/recording verifiers used for tests and fixture capture.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "compver/instrument.hpp"

namespace compver {

enum class VerificationStatus { pass, fail, timeout, tool_error };
enum class CheckMode { system, function };

std::string_view to_string(VerificationStatus s);
std::string_view to_string(CheckMode m);

struct VerifierConfig {
  std::string backend_path = "esbmc";
  std::vector<std::string> extra_flags;
  double timeout_s = 600.0;
  std::string replace_mode_flag = "--replace-call-with-contract";
  std::string enforce_mode_flag = "--enforce-contract";
  std::vector<std::string> success_markers{"VERIFICATION SUCCESSFUL"};
  std::vector<std::string> failure_markers{"VERIFICATION FAILED"};
  std::vector<std::string> timeout_markers{"Timed out"};
  std::vector<std::string> not_found_markers{"could not find function", "function not found",
                                             "Unable to find function"};
  std::vector<std::string> parse_error_markers{"PARSING ERROR", "CONVERSION ERROR", "error:"};
};

struct TraceStep {
  std::size_t step_index = 0;
  std::string function;
  std::size_t line = 0;
  std::map<std::string, std::string> assignments;   // name -> value text as printed
};

struct ParsedCounterexample {
  std::string violated_property;   // the failing expression
  std::string property_comment;    // e.g. "assertion", "postcondition"
  std::string violated_function;
  std::size_t violated_line = 0;
  std::vector<TraceStep> trace;
  std::map<std::string, std::string> key_variables;   // last value of each assigned name
};

/// Reasons attached to non-pass results; empty for plain pass/fail.
namespace reason {
inline constexpr std::string_view function_not_found = "function_not_found";
inline constexpr std::string_view parse_rejection = "parse_rejection";
inline constexpr std::string_view internal = "internal_error";
inline constexpr std::string_view empty_output = "empty_output";
inline constexpr std::string_view no_contract = "no_contract";
inline constexpr std::string_view contract_parse = "contract_parse_failure";
}  // namespace reason

struct VerificationResult {
  VerificationStatus status = VerificationStatus::tool_error;
  std::string raw_output;
  std::optional<ParsedCounterexample> parsed;
  double wall_time_s = 0.0;
  CheckMode mode = CheckMode::system;
  std::string function;   // function mode only
  std::string reason;

  bool passed() const { return status == VerificationStatus::pass; }
};

nlohmann::json to_json_value(const VerificationResult& r, bool with_timing);

struct OutputParse {
  VerificationStatus status = VerificationStatus::tool_error;
  std::optional<ParsedCounterexample> parsed;
  std::string reason;
};

/// Total: every text maps to one status. Failure output without a
/// recognizable trace gives fail with no parsed counterexample.
OutputParse parse_verifier_output(std::string_view raw, const VerifierConfig& cfg = {});

/// Strips scope qualifiers (`main::1::r` -> `r`).
std::string unqualified_name(std::string_view name);

class BackendNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pipeline deadline exceeded while a check was pending.
class DeadlineExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

struct CheckRequest {
  CheckMode mode = CheckMode::system;
  std::string function;
  const InstrumentedSource* source = nullptr;
  Deadline deadline;
};

/// Key under which a check's output is stored: sha256 of the mode line and
/// the instrumented text.
std::string fixture_key(CheckMode mode, std::string_view function, std::string_view text);
std::string fixture_key(const CheckRequest& req);

class Verifier {
 public:
  virtual ~Verifier() = default;

  /// `src` must be replace-mode.
  VerificationResult verify_system(const InstrumentedSource& src, Deadline deadline = {});
  /// `src` must be enforce-mode for `f`. Static functions are rejected
  /// without running the backend (reason function_not_found).
  VerificationResult verify_function(const InstrumentedSource& src, const std::string& f, Deadline deadline = {});

 protected:
  virtual VerificationResult run(const CheckRequest& req) = 0;
  friend class RecordingVerifier;
};

/// Runs the external backend, one process per check.
class BackendVerifier final : public Verifier {
 public:
  /// Throws BackendNotFound when the executable cannot be resolved.
  explicit BackendVerifier(VerifierConfig cfg);

  const VerifierConfig& config() const { return cfg_; }
  /// Argument vector for a check, minus the trailing source path.
  std::vector<std::string> command_for(const CheckRequest& req) const;

 protected:
  VerificationResult run(const CheckRequest& req) override;

 private:
  VerifierConfig cfg_;
  std::filesystem::path exe_;
};

struct ScriptedReply {
  std::string output;
  bool timed_out = false;
  ScriptedReply() = default;
  ScriptedReply(std::string out) : output(std::move(out)) {}   // NOLINT(implicit)
  ScriptedReply(const char* out) : output(out) {}              // NOLINT(implicit)
};

/// Answers checks from a callback producing raw backend output, which goes
/// through the same parser as real output. Thread-safe if the callback is.
class ScriptedVerifier final : public Verifier {
 public:
  using Script = std::function<ScriptedReply(const CheckRequest&)>;
  explicit ScriptedVerifier(Script script, VerifierConfig cfg = {});

  std::size_t calls() const;

 protected:
  VerificationResult run(const CheckRequest& req) override;

 private:
  Script script_;
  VerifierConfig cfg_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
};

/// Forwards to another verifier and writes each answer as a mock-backend
/// fixture (`<dir>/<key>.out`). Timeouts are recorded with a sleep header so
/// the mock reproduces them.
class RecordingVerifier final : public Verifier {
 public:
  RecordingVerifier(Verifier& inner, std::filesystem::path dir, long long timeout_sleep_ms = 3'600'000);

 protected:
  VerificationResult run(const CheckRequest& req) override;

 private:
  Verifier& inner_;
  std::filesystem::path dir_;
  long long sleep_ms_;
};

struct Fixture {
  std::string digest;
  long long sleep_ms = 0;
  int exit_code = 0;
  std::string output;
};

std::string render_fixture(const Fixture& f);
std::optional<Fixture> parse_fixture(std::string_view text);

/// Writes `text` to `path` through a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

}  // namespace compver
