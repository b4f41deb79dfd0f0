#include "compver/instrument.hpp"

#include <algorithm>

namespace compver {

std::string_view to_string(RenderMode m) { return m == RenderMode::enforce ? "enforce" : "replace"; }

namespace {

// Indentation of the first statement line inside the body, or four spaces.
std::string body_indent(std::string_view src, const ByteSpan& body) {
  auto nl = src.find('\n', body.begin);
  if (nl == std::string_view::npos || nl >= body.end) return "    ";
  std::size_t i = nl + 1;
  std::size_t j = i;
  while (j < body.end && (src[j] == ' ' || src[j] == '\t')) ++j;
  if (j >= body.end || src[j] == '}' || src[j] == '\n') return "    ";
  return std::string(src.substr(i, j - i));
}

void add_contract(std::vector<Injection>& out, std::string_view src, const FunctionInfo& f, const Contract& c,
                  bool with_invariants) {
  const auto indent = body_indent(src, f.body_span);
  const std::size_t at = f.body_span.begin + 1;
  auto line = [&](std::string_view macro, const std::string& e) {
    out.push_back({at, "\n" + indent + std::string(macro) + "(" + e + ");", f.name, e});
  };
  for (const auto& r : c.preconditions) line("__ESBMC_requires", r);
  for (const auto& a : c.assigns) line("__ESBMC_assigns", a);
  for (const auto& e : c.postconditions) line("__ESBMC_ensures", e);
  if (!with_invariants) return;
  for (const auto& [ordinal, inv] : c.loop_invariants) {
    if (ordinal >= f.loops.size())
      throw InstrumentError(InstrumentError::Kind::loop_ordinal_out_of_range,
                            f.name + " has no loop #" + std::to_string(ordinal));
    const auto& loop = f.loops[ordinal];
    std::string stmt = "__ESBMC_loop_invariant(" + inv + ");";
    if (loop.braced) {
      out.push_back({loop.body.begin + 1, " " + stmt, f.name, inv});
    } else {
      out.push_back({loop.body.begin, "{ " + stmt + " ", f.name, inv});
      out.push_back({loop.body.end, " }", f.name, ""});
    }
  }
}

std::string splice(std::string_view src, std::vector<Injection>& inj) {
  std::stable_sort(inj.begin(), inj.end(), [](const Injection& a, const Injection& b) { return a.offset < b.offset; });
  std::string out;
  std::size_t extra = 0;
  for (const auto& i : inj) extra += i.text.size();
  out.reserve(src.size() + extra);
  std::size_t pos = 0;
  for (const auto& i : inj) {
    out.append(src.substr(pos, i.offset - pos));
    out += i.text;
    pos = i.offset;
  }
  out.append(src.substr(pos));
  return out;
}

const FunctionInfo& lookup(const ProgramModel& model, const std::string& name) {
  const auto* f = model.find(name);
  if (f == nullptr) throw InstrumentError(InstrumentError::Kind::unknown_function, "unknown function: " + name);
  return *f;
}

}  // namespace

InstrumentedSource render_enforce(const ProgramModel& model, const Contract& c) {
  const auto& f = lookup(model, c.function_name);
  InstrumentedSource out;
  out.mode = RenderMode::enforce;
  out.target = f.name;
  add_contract(out.injections, model.source_text, f, c, true);
  out.text = splice(model.source_text, out.injections);
  return out;
}

InstrumentedSource render_replace(const ProgramModel& model, const ContractSet& contracts) {
  InstrumentedSource out;
  out.mode = RenderMode::replace;
  for (const auto& [name, c] : contracts) {
    const auto& f = lookup(model, name);
    add_contract(out.injections, model.source_text, f, c, false);
    out.replaced.push_back(name);
  }
  out.text = splice(model.source_text, out.injections);
  return out;
}

InstrumentedSource render_plain(const ProgramModel& model) { return render_replace(model, {}); }

std::string strip(const InstrumentedSource& src) {
  std::string out;
  out.reserve(src.text.size());
  std::size_t pos = 0;    // in src.text
  std::size_t shift = 0;  // bytes injected so far
  for (const auto& i : src.injections) {
    const std::size_t at = i.offset + shift;
    out.append(src.text, pos, at - pos);
    pos = at + i.text.size();
    shift += i.text.size();
  }
  out.append(src.text, pos);
  return out;
}

}  // namespace compver
