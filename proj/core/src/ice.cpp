#include "compver/ice.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "compver/c_lexer.hpp"
#include "compver/expr_eval.hpp"

namespace compver {

std::string_view to_string(ClassLevel l) { return l == ClassLevel::tool_level ? "tool_level" : "semantic_level"; }

std::string_view to_string(Category c) {
  switch (c) {
    case Category::syntax_error: return "syntax_error";
    case Category::unparsed: return "unparsed";
    case Category::tool_error: return "tool_error";
    case Category::unconstrained_init: return "unconstrained_init";
    case Category::semantic: return "semantic";
  }
  return "?";
}

std::string_view to_string(AdmitOutcome o) {
  switch (o) {
    case AdmitOutcome::added: return "added";
    case AdmitOutcome::duplicate: return "duplicate";
    case AdmitOutcome::conflict: return "conflict";
    case AdmitOutcome::rejected: return "rejected";
  }
  return "?";
}

namespace {

// `arr[2]` -> `arr`, `s.f` -> `s`, `p->x` -> `p`.
std::string base_name(std::string_view name) {
  auto n = unqualified_name(name);
  auto cut = n.find_first_of("[.-");
  return cut == std::string::npos ? n : n.substr(0, cut);
}

bool is_nondet_value(std::string_view v) { return v.find("nondet") != std::string_view::npos; }

// Identifiers of `expr` that name variables (not calls, not builtins).
std::vector<std::string> variable_names(std::string_view expr) {
  auto t = tokenize_code(expr);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t[i].is_identifier() || is_c_keyword(t[i].text)) continue;
    if (i > 0 && (t[i - 1].is(".") || t[i - 1].is("->"))) continue;
    if (i + 1 < t.size() && t[i + 1].is("(")) continue;
    std::string id(t[i].text);
    if (id.starts_with("__ESBMC") || id.starts_with("__VERIFIER") || id.starts_with("return_value")) continue;
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(std::move(id));
  }
  return out;
}

// Texts of assume-like annotations in `src`: __ESBMC_assume, __VERIFIER_assume,
// assume, __ESBMC_requires.
std::vector<std::string> assumption_texts(std::string_view src) {
  auto t = tokenize_code(src);
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!(t[i].is("__ESBMC_assume") || t[i].is("__VERIFIER_assume") || t[i].is("assume") ||
          t[i].is("__ESBMC_requires")))
      continue;
    if (!t[i + 1].is("(")) continue;
    auto close = match_bracket(t, i + 1);
    if (close == npos) continue;
    out.emplace_back(src.substr(t[i + 1].offset, t[close].end() - t[i + 1].offset));
  }
  return out;
}

bool mentions(std::string_view expr, std::string_view var) {
  auto ids = expression_identifiers(expr);
  return std::find(ids.begin(), ids.end(), var) != ids.end();
}

}  // namespace

Classification classify(const VerificationResult& r, std::string_view context_source) {
  switch (r.status) {
    case VerificationStatus::pass:
      throw std::invalid_argument("passing results are not classified");
    case VerificationStatus::timeout:
      return {ClassLevel::tool_level, Category::tool_error};
    case VerificationStatus::tool_error:
      if (r.reason == reason::parse_rejection || r.reason == reason::contract_parse || r.reason == reason::no_contract)
        return {ClassLevel::semantic_level, Category::syntax_error};
      return {ClassLevel::tool_level, Category::tool_error};
    case VerificationStatus::fail:
      break;
  }
  if (!r.parsed) return {ClassLevel::semantic_level, Category::unparsed};

  const auto& cx = *r.parsed;
  std::map<std::string, std::string> assigned;
  for (const auto& [k, v] : cx.key_variables) assigned[base_name(k)] = v;
  const auto assumptions = context_source.empty() ? std::vector<std::string>{} : assumption_texts(context_source);
  for (const auto& v : variable_names(cx.violated_property)) {
    auto it = assigned.find(v);
    bool unknown = it == assigned.end() ? !context_source.empty() : is_nondet_value(it->second);
    if (!unknown) continue;
    bool constrained = std::any_of(assumptions.begin(), assumptions.end(),
                                   [&](const std::string& a) { return mentions(a, v); });
    if (!constrained) return {ClassLevel::semantic_level, Category::unconstrained_init};
  }
  return {ClassLevel::semantic_level, Category::semantic};
}

StateExample make_example(std::string function, const std::map<std::string, std::string>& raw,
                          std::string provenance) {
  StateExample ex{std::move(function), {}, std::move(provenance)};
  for (const auto& [k, v] : raw) ex.valuation[unqualified_name(k)] = normalize_value(v);
  return ex;
}

namespace {

bool same_state(const StateExample& a, const StateExample& b) {
  return a.function == b.function && a.valuation == b.valuation;
}

const StateExample* find_state(const std::vector<StateExample>& set, const StateExample& ex) {
  for (const auto& e : set)
    if (same_state(e, ex)) return &e;
  return nullptr;
}

}  // namespace

AdmitOutcome IceDatabase::admit(const Classification& c, StateExample ex) {
  if (!c.admissible() || ex.valuation.empty()) return AdmitOutcome::rejected;
  if (const auto* pos = find_state(positives_, ex)) {
    conflicts_.push_back({Polarity::negative, std::move(ex), *pos});
    return AdmitOutcome::conflict;
  }
  if (find_state(negatives_, ex)) return AdmitOutcome::duplicate;
  negatives_.push_back(std::move(ex));
  return AdmitOutcome::added;
}

AdmitOutcome IceDatabase::record_positive(StateExample ex) {
  if (ex.valuation.empty()) return AdmitOutcome::rejected;
  if (const auto* neg = find_state(negatives_, ex)) {
    conflicts_.push_back({Polarity::positive, std::move(ex), *neg});
    return AdmitOutcome::conflict;
  }
  if (find_state(positives_, ex)) return AdmitOutcome::duplicate;
  positives_.push_back(std::move(ex));
  return AdmitOutcome::added;
}

AdmitOutcome IceDatabase::add_implication(ImplicationExample imp) {
  if (imp.pre.empty() || imp.post.empty()) return AdmitOutcome::rejected;
  for (const auto& i : implications_)
    if (i.function == imp.function && i.pre == imp.pre && i.post == imp.post) return AdmitOutcome::duplicate;
  implications_.push_back(std::move(imp));
  return AdmitOutcome::added;
}

void IceDatabase::merge(const IceDatabase& other) {
  static const Classification semantic{ClassLevel::semantic_level, Category::semantic};
  for (const auto& p : other.positives_) record_positive(p);
  for (const auto& n : other.negatives_) admit(semantic, n);
  for (const auto& i : other.implications_) add_implication(i);
  for (const auto& c : other.conflicts_) conflicts_.push_back(c);
}

std::vector<StateExample> IceDatabase::positives_for(std::string_view f) const {
  std::vector<StateExample> out;
  for (const auto& e : positives_)
    if (e.function == f) out.push_back(e);
  return out;
}

std::vector<StateExample> IceDatabase::negatives_for(std::string_view f) const {
  std::vector<StateExample> out;
  for (const auto& e : negatives_)
    if (e.function == f) out.push_back(e);
  return out;
}

std::vector<ImplicationExample> IceDatabase::implications_for(std::string_view f) const {
  std::vector<ImplicationExample> out;
  for (const auto& e : implications_)
    if (e.function == f) out.push_back(e);
  return out;
}

std::vector<std::string> IceDatabase::functions() const {
  std::set<std::string> names;
  for (const auto& e : positives_) names.insert(e.function);
  for (const auto& e : negatives_) names.insert(e.function);
  for (const auto& e : implications_) names.insert(e.function);
  return {names.begin(), names.end()};
}

bool IceDatabase::empty() const {
  return positives_.empty() && negatives_.empty() && implications_.empty() && conflicts_.empty();
}

std::string render_valuation(const ValuationText& v) {
  std::string out;
  for (const auto& [k, val] : v) {
    if (!out.empty()) out += ' ';
    out += k + "=" + val;
  }
  return out;
}

namespace {

std::string example_line(std::string_view tag, const StateExample& e) {
  std::string line = std::string(tag) + " " + e.function;
  if (!e.provenance.empty()) line += " @" + e.provenance;
  return line + " " + render_valuation(e.valuation);
}

ValuationText parse_pairs(const std::vector<std::string>& words, std::size_t b, std::size_t e) {
  ValuationText v;
  for (std::size_t i = b; i < e; ++i) {
    auto eq = words[i].find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad pair: " + words[i]);
    v[words[i].substr(0, eq)] = words[i].substr(eq + 1);
  }
  return v;
}

}  // namespace

std::string IceDatabase::serialize() const {
  std::string out;
  for (const auto& e : positives_) out += example_line("pos", e) + "\n";
  for (const auto& e : negatives_) out += example_line("neg", e) + "\n";
  for (const auto& i : implications_) {
    out += "imp " + i.function;
    if (!i.provenance.empty()) out += " @" + i.provenance;
    out += " " + render_valuation(i.pre) + " => " + render_valuation(i.post) + "\n";
  }
  for (const auto& c : conflicts_)
    out += example_line(c.attempted == Polarity::positive ? "conflict pos" : "conflict neg", c.candidate) + "\n";
  return out;
}

IceDatabase IceDatabase::deserialize(std::string_view text) {
  IceDatabase db;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> w;
    for (std::string s; ls >> s;) w.push_back(s);
    if (w.empty()) continue;
    std::size_t at = 1;
    std::optional<Polarity> conflict;
    if (w[0] == "conflict") {
      if (w.size() < 3) throw std::invalid_argument("bad line: " + line);
      conflict = w[1] == "pos" ? Polarity::positive : Polarity::negative;
      at = 2;
    }
    if (at >= w.size()) throw std::invalid_argument("bad line: " + line);
    std::string fn = w[at++];
    std::string prov;
    if (at < w.size() && w[at].starts_with("@")) prov = w[at++].substr(1);
    if (conflict) {
      StateExample ex{fn, parse_pairs(w, at, w.size()), prov};
      db.conflicts_.push_back({*conflict, ex, ex});
    } else if (w[0] == "pos" || w[0] == "neg") {
      StateExample ex{fn, parse_pairs(w, at, w.size()), prov};
      (w[0] == "pos" ? db.positives_ : db.negatives_).push_back(std::move(ex));
    } else if (w[0] == "imp") {
      auto arrow = std::find(w.begin() + static_cast<std::ptrdiff_t>(at), w.end(), "=>");
      if (arrow == w.end()) throw std::invalid_argument("bad implication: " + line);
      auto mid = static_cast<std::size_t>(arrow - w.begin());
      db.implications_.push_back({fn, parse_pairs(w, at, mid), parse_pairs(w, mid + 1, w.size()), prov});
    } else {
      throw std::invalid_argument("bad line: " + line);
    }
  }
  return db;
}

std::vector<ImplicationExample> extract_implications(const ParsedCounterexample& cx, const FunctionInfo& f,
                                                     std::string_view provenance) {
  std::vector<ImplicationExample> out;
  if (f.loops.empty()) return out;
  std::vector<const TraceStep*> steps;
  for (const auto& s : cx.trace)
    if (s.function == f.name) steps.push_back(&s);
  if (steps.size() < 2) return out;

  // A pre-state is frozen when a variable is assigned a second time; the
  // post-state is taken once every variable of the pre-state was re-assigned.
  ValuationText state;
  std::optional<ValuationText> pre;
  std::set<std::string> touched;
  for (const auto* s : steps) {
    for (const auto& [raw_name, raw_value] : s->assignments) {
      auto name = unqualified_name(raw_name);
      auto value = normalize_value(raw_value);
      if (!pre && state.contains(name)) {
        pre = state;
        touched.clear();
      }
      if (pre) touched.insert(name);
      state[name] = value;
      if (pre && std::all_of(pre->begin(), pre->end(), [&](const auto& kv) { return touched.contains(kv.first); })) {
        ImplicationExample imp{f.name, *pre, state, std::string(provenance)};
        if (std::find(out.begin(), out.end(), imp) == out.end()) out.push_back(std::move(imp));
        pre.reset();
      }
    }
  }
  return out;
}

StateExample negative_example(const ParsedCounterexample& cx, const FunctionInfo& f, const ProgramModel& model,
                              std::string provenance) {
  std::map<std::string, std::string> raw;
  auto relevant = [&](const std::string& n) {
    auto b = base_name(n);
    return f.has_param(b) || model.is_global(b) || b.find("return_value") != std::string::npos;
  };
  for (const auto& s : cx.trace) {
    if (s.function != f.name) continue;
    for (const auto& [k, v] : s.assignments)
      if (relevant(unqualified_name(k))) raw[k] = v;
  }
  if (raw.empty()) raw = cx.key_variables;
  return make_example(f.name, raw, std::move(provenance));
}

std::vector<StateExample> call_site_positives(const ProgramModel& model, const FunctionInfo& f,
                                              std::string provenance) {
  std::vector<StateExample> out;
  for (const auto& call : model.main_calls) {
    if (call.callee != f.name || call.args.size() != f.params.size() || f.params.empty()) continue;
    std::map<std::string, std::string> raw;
    bool literal = true;
    for (std::size_t i = 0; i < call.args.size() && literal; ++i) {
      auto v = parse_c_integer(call.args[i]);
      if (!v) literal = false;
      else raw[f.params[i].name] = std::to_string(*v);
    }
    if (literal) out.push_back(make_example(f.name, raw, provenance));
  }
  return out;
}

std::vector<GapScore> gap_scores(const ParsedCounterexample& cx, const ContractSet& contracts,
                                 const ProgramModel& model) {
  std::set<std::string> keys;
  for (const auto& [k, v] : cx.key_variables) keys.insert(base_name(k));
  for (const auto& v : variable_names(cx.violated_property)) keys.insert(v);

  std::map<std::string, std::set<std::string>> mapped;
  for (const auto& [name, c] : contracts) {
    for (const auto& k : keys) {
      auto hit = [&](const std::vector<std::string>& clauses) {
        return std::any_of(clauses.begin(), clauses.end(), [&](const std::string& e) { return mentions(e, k); });
      };
      if (hit(c.preconditions) || hit(c.postconditions) || hit(c.assigns)) mapped[name].insert(k);
    }
  }
  for (const auto& call : model.main_calls)
    if (call.assigned_to && keys.contains(*call.assigned_to) && model.find(call.callee))
      mapped[call.callee].insert(*call.assigned_to);

  std::vector<GapScore> out;
  for (const auto& [name, vars] : mapped) {
    GapScore g{name, vars.size(), 0, 0.0};
    if (auto it = contracts.find(name); it != contracts.end())
      for (const auto& e : it->second.postconditions)
        if (std::any_of(keys.begin(), keys.end(), [&](const std::string& k) { return mentions(e, k); }))
          ++g.covering_ensures;
    g.gap = static_cast<double>(g.mapped) / (1.0 + static_cast<double>(g.covering_ensures));
    out.push_back(g);
  }
  std::stable_sort(out.begin(), out.end(), [](const GapScore& a, const GapScore& b) {
    if (a.gap != b.gap) return a.gap > b.gap;
    return a.function < b.function;
  });
  return out;
}

std::string weakest_link(const ParsedCounterexample& cx, const ContractSet& contracts, const ProgramModel& model) {
  auto scores = gap_scores(cx, contracts, model);
  if (scores.empty()) throw NoResponsibleFunction("no key variable maps to a function");
  return scores.front().function;
}

std::string render_example_sections(const IceDatabase& db, const DiagnosticOptions& opts) {
  std::ostringstream out;
  std::vector<std::string> fns = opts.function ? std::vector<std::string>{*opts.function} : db.functions();
  auto recent = [&](std::vector<StateExample> v) {
    if (v.size() > opts.limit) v.erase(v.begin(), v.end() - static_cast<std::ptrdiff_t>(opts.limit));
    return v;
  };
  out << markers::positives << "\n";
  for (const auto& f : fns)
    for (const auto& e : recent(db.positives_for(f))) out << f << ": " << render_valuation(e.valuation) << "\n";
  out << markers::negatives << "\n";
  for (const auto& f : fns)
    for (const auto& e : recent(db.negatives_for(f))) out << f << ": " << render_valuation(e.valuation) << "\n";
  out << markers::implications << "\n";
  for (const auto& f : fns) {
    auto imps = db.implications_for(f);
    if (imps.size() > opts.limit) imps.erase(imps.begin(), imps.end() - static_cast<std::ptrdiff_t>(opts.limit));
    for (const auto& i : imps) out << f << ": " << render_valuation(i.pre) << " => " << render_valuation(i.post) << "\n";
  }
  out << markers::conflicts << "\n";
  for (const auto& cf : db.conflicts()) {
    if (opts.function && cf.candidate.function != *opts.function) continue;
    out << cf.candidate.function << ": " << (cf.attempted == Polarity::positive ? "positive" : "negative") << " "
        << render_valuation(cf.candidate.valuation) << " clashes with an existing "
        << (cf.attempted == Polarity::positive ? "negative" : "positive") << " example\n";
  }
  return out.str();
}

std::string render_diagnostics(const IceDatabase& db, const ParsedCounterexample* cx, const Classification& c,
                               const DiagnosticOptions& opts) {
  std::ostringstream out;
  out << "== Classification ==\n" << to_string(c.category) << " (" << to_string(c.level) << ")\n";
  out << "== Violated property ==\n";
  if (cx) {
    out << cx->violated_property;
    if (!cx->violated_function.empty()) out << "  [function " << cx->violated_function << ", line " << cx->violated_line << "]";
    if (!cx->property_comment.empty()) out << "  (" << cx->property_comment << ")";
    out << "\n== Trace ==\n";
    for (const auto& s : cx->trace) {
      out << "step " << s.step_index << " [" << s.function << ":" << s.line << "]";
      for (const auto& [k, v] : s.assignments) out << " " << k << " = " << v << ";";
      out << "\n";
    }
  } else {
    out << "(no parsed counterexample)\n== Trace ==\n";
  }

  out << render_example_sections(db, opts);
  return out.str();
}

std::string render_raw_diagnostics(const VerificationResult& r) {
  std::string out(markers::raw);
  out += "\n" + r.raw_output;
  if (!out.empty() && out.back() != '\n') out += '\n';
  return out;
}

}  // namespace compver
