#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "compver/c_lexer.hpp"
#include "compver/program_model.hpp"

namespace compver {

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::minimal: return "minimal";
    case Tier::low: return "low";
    case Tier::medium: return "medium";
    case Tier::high: return "high";
  }
  return "?";
}

Tier tier_for_score(double score) {
  if (score >= 20.0) return Tier::high;
  if (score >= 10.0) return Tier::medium;
  if (score >= 5.0) return Tier::low;
  return Tier::minimal;
}

ComplexityMetrics score_complexity(const FunctionInfo& f, const WeightTable& w) {
  ComplexityMetrics m = f.metrics;
  m.has_recursion = f.is_recursive;
  m.score = w.loop * static_cast<double>(m.loop_count) +
            w.nesting * static_cast<double>(m.max_nesting_depth) +
            (m.has_recursion ? w.recursion : 0.0) + (m.has_unbounded_loop ? w.unbounded_loop : 0.0) +
            w.dynamic_alloc * static_cast<double>(m.dynamic_alloc_count) +
            w.branch * static_cast<double>(m.branch_count) +
            w.pointer_op * static_cast<double>(m.pointer_op_count);
  m.tier = tier_for_score(m.score);
  return m;
}

FunctionPartition partition_functions(const ProgramModel& model, double tau) {
  FunctionPartition p;
  for (const auto& f : model.functions) (f.metrics.score < tau ? p.low : p.high).push_back(f.name);
  return p;
}

WeightTable WeightTable::parse(std::string_view text) {
  WeightTable w;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("weights line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value_text = trim(std::string_view(body).substr(eq + 1));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc{} || ptr != value_text.data() + value_text.size())
      throw std::invalid_argument("weights line " + std::to_string(lineno) + ": bad number '" + value_text + "'");
    if (!(value > 0.0))
      throw std::invalid_argument("weights line " + std::to_string(lineno) + ": weight must be positive");
    if (key == "loop") w.loop = value;
    else if (key == "nesting") w.nesting = value;
    else if (key == "recursion") w.recursion = value;
    else if (key == "unbounded_loop") w.unbounded_loop = value;
    else if (key == "dynamic_alloc") w.dynamic_alloc = value;
    else if (key == "branch") w.branch = value;
    else if (key == "pointer_op") w.pointer_op = value;
    else throw std::invalid_argument("weights line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return w;
}

WeightTable WeightTable::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot read weights file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace compver
