#pragma once

// Prompt construction for the five synthesis intents. Templates are text
// assets with `{placeholder}` slots and one mandatory intent marker each.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "compver/contract.hpp"
#include "compver/program_model.hpp"

namespace compver {

enum class Intent { initial, overapproximate, relax, strengthen, cegis };

std::string_view to_string(Intent i);
std::optional<Intent> intent_from_string(std::string_view s);

/// "[INTENT:RELAX]" and so on; every rendered prompt contains its marker.
std::string intent_marker(Intent i);

struct SynthesisRequest {
  Intent intent = Intent::initial;
  const FunctionInfo* function = nullptr;
  const ProgramModel* model = nullptr;
  std::optional<Contract> current_contract;
  std::optional<std::string> diagnostics;      // required for relax/strengthen
  std::optional<std::string> cegis_examples;   // required for cegis
  std::string retry_feedback;
};

class PromptTemplates {
 public:
  /// The templates compiled into the library.
  static PromptTemplates builtin();
  /// `<dir>/<intent>.txt` overrides the built-in template of that intent.
  /// Throws std::invalid_argument when an override lacks its marker.
  static PromptTemplates load(const std::filesystem::path& dir);

  const std::string& text(Intent i) const;
  void set(Intent i, std::string text);

  /// Throws std::invalid_argument when the request misses the fields its
  /// intent needs.
  std::string render(const SynthesisRequest& req) const;

 private:
  std::map<Intent, std::string> texts_;
};

/// main's body plus the call sites of `f` in it.
std::string call_context(const ProgramModel& model, const FunctionInfo& f);

}  // namespace compver
