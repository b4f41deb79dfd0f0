#include <regex>
#include <sstream>

#include "compver/c_lexer.hpp"
#include "compver/verifier.hpp"

namespace compver {

std::string_view to_string(VerificationStatus s) {
  switch (s) {
    case VerificationStatus::pass: return "pass";
    case VerificationStatus::fail: return "fail";
    case VerificationStatus::timeout: return "timeout";
    case VerificationStatus::tool_error: return "tool_error";
  }
  return "?";
}

std::string_view to_string(CheckMode m) { return m == CheckMode::system ? "system" : "function"; }

std::string unqualified_name(std::string_view name) {
  auto pos = name.rfind("::");
  if (pos == std::string_view::npos) return trim(name);
  return trim(name.substr(pos + 2));
}

namespace {

bool contains_any(std::string_view text, const std::vector<std::string>& markers) {
  for (const auto& m : markers)
    if (!m.empty() && text.find(m) != std::string_view::npos) return true;
  return false;
}

std::vector<std::string> split_lines(std::string_view raw) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    auto nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw.size();
    std::string line(raw.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

// "  x = 5 (00000000 00000101)" -> ("x", "5"). The parenthesized bit pattern
// is dropped when it holds only binary digits and spaces.
std::optional<std::pair<std::string, std::string>> assignment(const std::string& line) {
  auto eq = line.find(" = ");
  if (eq == std::string::npos || line.empty() || (line[0] != ' ' && line[0] != '\t')) return std::nullopt;
  std::string name = unqualified_name(line.substr(0, eq));
  std::string value = trim(std::string_view(line).substr(eq + 3));
  if (name.empty() || name.find(' ') != std::string::npos) return std::nullopt;
  if (!value.empty() && value.back() == ')') {
    auto open = value.rfind(" (");
    if (open != std::string::npos) {
      auto bits = value.substr(open + 2, value.size() - open - 3);
      if (!bits.empty() && bits.find_first_not_of("01 ") == std::string::npos) value = trim(value.substr(0, open));
    }
  }
  return std::make_pair(name, value);
}

std::optional<ParsedCounterexample> parse_trace(const std::vector<std::string>& lines) {
  static const std::regex state_re(R"(^State (\d+) file (\S+) line (\d+)(?: column \d+)? function (\S+) thread \d+)");
  static const std::regex loc_re(R"(^\s*file (\S+) line (\d+)(?: column \d+)? function (\S+))");
  ParsedCounterexample cx;
  bool in_violation = false;
  bool saw_violation = false;
  std::vector<std::string> violation_lines;
  TraceStep* current = nullptr;
  std::vector<TraceStep> steps;
  for (const auto& line : lines) {
    std::smatch m;
    if (std::regex_search(line, m, state_re)) {
      steps.push_back({std::stoul(m[1]), m[4], std::stoul(m[3]), {}});
      current = &steps.back();
      in_violation = false;
      continue;
    }
    if (line.rfind("Violated property:", 0) == 0) {
      in_violation = true;
      saw_violation = true;
      current = nullptr;
      continue;
    }
    if (in_violation) {
      if (trim(line).empty()) {
        if (!violation_lines.empty()) in_violation = false;
        continue;
      }
      if (std::regex_search(line, m, loc_re) && violation_lines.empty() && cx.violated_function.empty()) {
        cx.violated_line = std::stoul(m[2]);
        cx.violated_function = m[3];
        continue;
      }
      violation_lines.push_back(trim(line));
      continue;
    }
    if (current == nullptr) continue;
    if (auto a = assignment(line)) current->assignments[a->first] = a->second;
  }
  if (!saw_violation || violation_lines.empty()) return std::nullopt;
  cx.violated_property = violation_lines.back();
  violation_lines.pop_back();
  for (const auto& l : violation_lines) {
    if (!cx.property_comment.empty()) cx.property_comment += ' ';
    cx.property_comment += l;
  }
  for (auto& s : steps) {
    if (s.assignments.empty()) continue;
    for (const auto& [k, v] : s.assignments) cx.key_variables[k] = v;
    cx.trace.push_back(std::move(s));
  }
  return cx;
}

}  // namespace

OutputParse parse_verifier_output(std::string_view raw, const VerifierConfig& cfg) {
  OutputParse out;
  if (trim(raw).empty()) {
    out.reason = reason::empty_output;
    return out;
  }
  if (contains_any(raw, cfg.failure_markers)) {
    out.status = VerificationStatus::fail;
    out.parsed = parse_trace(split_lines(raw));
    return out;
  }
  if (contains_any(raw, cfg.success_markers)) {
    out.status = VerificationStatus::pass;
    return out;
  }
  if (contains_any(raw, cfg.timeout_markers)) {
    out.status = VerificationStatus::timeout;
    return out;
  }
  if (contains_any(raw, cfg.not_found_markers)) out.reason = reason::function_not_found;
  else if (contains_any(raw, cfg.parse_error_markers)) out.reason = reason::parse_rejection;
  else out.reason = reason::internal;
  return out;
}

nlohmann::json to_json_value(const VerificationResult& r, bool with_timing) {
  nlohmann::json j{{"status", to_string(r.status)}, {"mode", to_string(r.mode)}};
  if (r.mode == CheckMode::function) j["function"] = r.function;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (r.parsed) {
    j["violated_property"] = r.parsed->violated_property;
    j["key_variables"] = r.parsed->key_variables;
  }
  if (with_timing) j["wall_time_s"] = r.wall_time_s;
  return j;
}

std::string render_fixture(const Fixture& f) {
  std::string out = "digest: " + f.digest + "\n";
  if (f.sleep_ms > 0) out += "x-sleep-ms: " + std::to_string(f.sleep_ms) + "\n";
  if (f.exit_code != 0) out += "x-exit-code: " + std::to_string(f.exit_code) + "\n";
  return out + f.output;
}

std::optional<Fixture> parse_fixture(std::string_view text) {
  Fixture f;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    auto next = nl == std::string_view::npos ? text.size() : nl + 1;
    if (first) {
      if (line.rfind("digest: ", 0) != 0) return std::nullopt;
      f.digest = trim(line.substr(8));
      first = false;
    } else if (line.rfind("x-sleep-ms: ", 0) == 0) {
      f.sleep_ms = std::stoll(std::string(line.substr(12)));
    } else if (line.rfind("x-exit-code: ", 0) == 0) {
      f.exit_code = std::stoi(std::string(line.substr(13)));
    } else {
      break;
    }
    pos = next;
  }
  if (first) return std::nullopt;
  f.output = std::string(text.substr(pos));
  return f;
}

}  // namespace compver
