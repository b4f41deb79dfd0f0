#include "compver/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace compver {

namespace detail {
const std::map<std::string, std::string>& builtin_templates();
}

namespace {
constexpr Intent kIntents[] = {Intent::initial, Intent::overapproximate, Intent::relax, Intent::strengthen,
                               Intent::cegis};
}

std::string_view to_string(Intent i) {
  switch (i) {
    case Intent::initial: return "initial";
    case Intent::overapproximate: return "overapproximate";
    case Intent::relax: return "relax";
    case Intent::strengthen: return "strengthen";
    case Intent::cegis: return "cegis";
  }
  return "?";
}

std::optional<Intent> intent_from_string(std::string_view s) {
  for (auto i : kIntents)
    if (to_string(i) == s) return i;
  return std::nullopt;
}

std::string intent_marker(Intent i) {
  std::string name(to_string(i));
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return "[INTENT:" + name + "]";
}

PromptTemplates PromptTemplates::builtin() {
  PromptTemplates t;
  const auto& all = detail::builtin_templates();
  for (auto i : kIntents) t.texts_[i] = all.at(std::string(to_string(i)));
  return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  auto t = builtin();
  for (auto i : kIntents) {
    auto file = dir / (std::string(to_string(i)) + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    t.set(i, ss.str());
  }
  return t;
}

const std::string& PromptTemplates::text(Intent i) const { return texts_.at(i); }

void PromptTemplates::set(Intent i, std::string text) {
  if (text.find(intent_marker(i)) == std::string::npos)
    throw std::invalid_argument("template for " + std::string(to_string(i)) + " lacks marker " + intent_marker(i));
  texts_[i] = std::move(text);
}

std::string call_context(const ProgramModel& model, const FunctionInfo& f) {
  std::string out = "```c\n" + model.source_text.substr(model.main_span.begin, model.main_span.size()) + "\n```\n";
  for (const auto& c : model.main_calls) {
    if (c.callee != f.name) continue;
    out += "call: " + f.name + "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) out += (i ? ", " : "") + c.args[i];
    out += ")";
    if (c.assigned_to) out += " -> " + *c.assigned_to;
    out += "\n";
  }
  return out;
}

std::string PromptTemplates::render(const SynthesisRequest& req) const {
  if (req.function == nullptr || req.model == nullptr) throw std::invalid_argument("request lacks function/model");
  if ((req.intent == Intent::relax || req.intent == Intent::strengthen) && !req.diagnostics)
    throw std::invalid_argument(std::string(to_string(req.intent)) + " request needs diagnostics");
  if (req.intent == Intent::cegis && !req.cegis_examples) throw std::invalid_argument("cegis request needs examples");

  const auto& f = *req.function;
  const auto& m = *req.model;
  std::map<std::string, std::string, std::less<>> slots{
      {"function_name", f.name},
      {"function_source", m.source_text.substr(f.span.begin, f.span.size())},
      {"property", m.property.assertion_text},
      {"call_context", call_context(m, f)},
      {"current_contract", req.current_contract ? req.current_contract->text() : "(none)\n"},
      {"diagnostics", req.diagnostics.value_or("(none)")},
      {"examples", req.cegis_examples.value_or("")},
      {"retry_feedback", req.retry_feedback.empty() ? "" : "\nYour previous reply was rejected: " + req.retry_feedback + "\n"},
  };

  const auto& tpl = text(req.intent);
  std::string out;
  out.reserve(tpl.size() * 2);
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] == '{') {
      auto close = tpl.find('}', i);
      if (close != std::string::npos) {
        auto it = slots.find(std::string_view(tpl).substr(i + 1, close - i - 1));
        if (it != slots.end()) {
          out += it->second;
          i = close;
          continue;
        }
      }
    }
    out += tpl[i];
  }
  return out;
}

}  // namespace compver
