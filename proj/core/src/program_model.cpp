#include "compver/program_model.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include "compver/c_lexer.hpp"
#include "model_internal.hpp"

namespace compver {

using detail::Toks;

std::string_view to_string(ProgramParseError::Kind k) {
  switch (k) {
    case ProgramParseError::Kind::no_main: return "NoMain";
    case ProgramParseError::Kind::no_property: return "NoProperty";
    case ProgramParseError::Kind::multiple_properties: return "MultipleProperties";
    case ProgramParseError::Kind::unbalanced_source: return "UnbalancedSource";
  }
  return "?";
}

bool FunctionInfo::returns_value() const { return return_type != "void" && !return_type.empty(); }

bool FunctionInfo::has_param(std::string_view n) const {
  return std::any_of(params.begin(), params.end(), [&](const Param& p) { return p.name == n; });
}

const FunctionInfo* ProgramModel::find(std::string_view name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const FunctionInfo& ProgramModel::at(std::string_view name) const {
  if (auto* f = find(name)) return *f;
  throw std::out_of_range("unknown function: " + std::string(name));
}

bool ProgramModel::is_global(std::string_view name) const {
  return std::find(globals.begin(), globals.end(), name) != globals.end();
}

std::vector<std::string> ProgramModel::function_names() const {
  std::vector<std::string> names;
  for (const auto& f : functions) names.push_back(f.name);
  return names;
}

std::vector<std::string> ProgramModel::reachable_from_main() const {
  std::set<std::string> seen;
  std::vector<std::string> work;
  for (const auto& c : main_calls) work.push_back(c.callee);
  while (!work.empty()) {
    auto name = work.back();
    work.pop_back();
    if (!seen.insert(name).second) continue;
    if (auto* f = find(name))
      for (const auto& c : f->callees) work.push_back(c);
  }
  return {seen.begin(), seen.end()};
}

namespace detail {

std::size_t statement_end(const Toks& t, std::size_t i, std::size_t limit) {
  if (i >= limit) return limit;
  auto header_end = [&](std::size_t kw) -> std::size_t {
    std::size_t p = kw + 1;
    if (p < limit && t[p].is("(")) {
      auto m = match_bracket(t, p);
      return (m == npos || m >= limit) ? limit : m + 1;
    }
    return limit;
  };
  if (t[i].is("{")) {
    auto m = match_bracket(t, i);
    return (m == npos || m >= limit) ? limit : m + 1;
  }
  if (t[i].is("for") || t[i].is("while") || t[i].is("switch")) {
    return statement_end(t, header_end(i), limit);
  }
  if (t[i].is("if")) {
    auto e = statement_end(t, header_end(i), limit);
    if (e < limit && t[e].is("else")) return statement_end(t, e + 1, limit);
    return e;
  }
  if (t[i].is("else")) return statement_end(t, i + 1, limit);
  if (t[i].is("do")) {
    auto e = statement_end(t, i + 1, limit);
    if (e < limit && t[e].is("while")) {
      e = header_end(e);
      if (e < limit && t[e].is(";")) ++e;
    }
    return e;
  }
  int depth = 0;
  for (std::size_t j = i; j < limit; ++j) {
    const auto& tok = t[j];
    if (tok.kind != TokenKind::punct) continue;
    if (tok.is("(") || tok.is("[") || tok.is("{")) {
      ++depth;
    } else if (tok.is(")") || tok.is("]") || tok.is("}")) {
      if (depth == 0) return j;
      --depth;
    } else if (tok.is(";") && depth == 0) {
      return j + 1;
    }
  }
  return limit;
}

bool is_assignment_op(const Token& t) {
  static const std::set<std::string_view> ops{"=",  "+=", "-=", "*=", "/=",  "%=",
                                              "&=", "|=", "^=", "<<=", ">>="};
  return t.kind == TokenKind::punct && ops.contains(t.text);
}

std::set<std::string> updated_identifiers(const Toks& t, std::size_t b, std::size_t e) {
  std::set<std::string> out;
  for (std::size_t i = b; i < e; ++i) {
    if (!t[i].is_identifier() || is_c_keyword(t[i].text)) continue;
    if (i > b && (t[i - 1].is(".") || t[i - 1].is("->"))) continue;
    bool pre = i > b && (t[i - 1].is("++") || t[i - 1].is("--"));
    bool post = i + 1 < e && (t[i + 1].is("++") || t[i + 1].is("--") || is_assignment_op(t[i + 1]));
    if (pre || post) out.insert(std::string(t[i].text));
  }
  return out;
}

// Splits [b, e) on depth-0 occurrences of `sep`.
std::vector<std::pair<std::size_t, std::size_t>> split_top(const Toks& t, std::size_t b, std::size_t e,
                                                           std::string_view sep) {
  std::vector<std::pair<std::size_t, std::size_t>> parts;
  int depth = 0;
  std::size_t start = b;
  for (std::size_t i = b; i < e; ++i) {
    if (t[i].kind == TokenKind::punct) {
      if (t[i].is("(") || t[i].is("[") || t[i].is("{")) ++depth;
      else if (t[i].is(")") || t[i].is("]") || t[i].is("}")) --depth;
      else if (depth == 0 && t[i].text == sep) {
        parts.emplace_back(start, i);
        start = i + 1;
      }
    }
  }
  parts.emplace_back(start, e);
  return parts;
}

std::string join_tokens(const Toks& t, std::size_t b, std::size_t e) {
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (!out.empty()) out += ' ';
    out += t[i].text;
  }
  return out;
}

std::string source_text(std::string_view src, const Toks& t, std::size_t b, std::size_t e) {
  if (b >= e) return {};
  return std::string(src.substr(t[b].offset, t[e - 1].end() - t[b].offset));
}

}  // namespace detail

namespace {

using namespace detail;

std::size_t match_backward(const Toks& t, std::size_t close) {
  int depth = 0;
  for (std::size_t j = close + 1; j-- > 0;) {
    if (t[j].is(")")) ++depth;
    else if (t[j].is("(") && --depth == 0) return j;
  }
  return npos;
}

bool is_operatorish(const Token& t) {
  if (t.kind == TokenKind::punct)
    return !(t.is(")") || t.is("]") || t.is("++") || t.is("--") || t.is("}"));
  return t.is("return") || t.is("case") || t.is("sizeof");
}

std::vector<Param> parse_params(const Toks& t, std::size_t open, std::size_t close) {
  std::vector<Param> params;
  if (close == open + 1) return params;
  if (close == open + 2 && t[open + 1].is("void")) return params;
  for (auto [b, e] : split_top(t, open + 1, close, ",")) {
    if (b >= e) continue;
    if (t[b].is("...")) continue;
    std::size_t name_idx = npos;
    // Function-pointer parameter: T (*name)(...)
    for (std::size_t i = b; i + 2 < e; ++i) {
      if (t[i].is("(") && t[i + 1].is("*") && t[i + 2].is_identifier()) {
        name_idx = i + 2;
        break;
      }
    }
    if (name_idx == npos) {
      std::size_t stop = e;
      for (std::size_t i = b; i < e; ++i)
        if (t[i].is("[")) {
          stop = i;
          break;
        }
      for (std::size_t i = stop; i > b; --i) {
        const auto& tok = t[i - 1];
        if (tok.is_identifier() && !is_c_keyword(tok.text)) {
          name_idx = i - 1;
          break;
        }
      }
      // A lone type name (`int f(T)`) has no parameter name.
      if (name_idx == b && stop - b == 1) name_idx = npos;
    }
    Param p;
    if (name_idx != npos) {
      p.name = std::string(t[name_idx].text);
      std::string type;
      for (std::size_t i = b; i < e; ++i) {
        if (i == name_idx) continue;
        if (!type.empty()) type += ' ';
        type += t[i].text;
      }
      p.type = type;
    } else {
      p.type = join_tokens(t, b, e);
    }
    params.push_back(std::move(p));
  }
  return params;
}

bool is_pointer_param(const Param& p) {
  return p.type.find('*') != std::string::npos || p.type.find('[') != std::string::npos;
}

std::vector<std::string> scan_locals(const Toks& t, std::size_t b, std::size_t e,
                                     const std::set<std::string>& type_names) {
  std::vector<std::string> locals;
  auto add = [&](std::string_view n) {
    std::string s(n);
    if (std::find(locals.begin(), locals.end(), s) == locals.end()) locals.push_back(std::move(s));
  };
  for (std::size_t i = b; i < e; ++i) {
    if (!t[i].is_identifier() || is_c_keyword(t[i].text)) continue;
    if (i + 1 >= e) continue;
    const auto& next = t[i + 1];
    if (!(next.is("=") || next.is(";") || next.is(",") || next.is("[") || next.is(")"))) continue;
    std::size_t p = i;
    while (p > b && t[p - 1].is("*")) --p;
    if (p == b) continue;
    const auto& prev = t[p - 1];
    bool decl = false;
    if (prev.is_identifier() && is_type_keyword(prev.text) && !prev.is("struct") && !prev.is("union")) {
      decl = true;
    } else if (prev.is_identifier() && !is_c_keyword(prev.text) &&
               (type_names.contains(std::string(prev.text)) || p - 1 == b || t[p - 2].is(";") ||
                t[p - 2].is("{") || t[p - 2].is("}") || t[p - 2].is("struct") ||
                t[p - 2].is("union") || t[p - 2].is("enum") || t[p - 2].is("const") ||
                (t[p - 2].is("(") && p >= 3 && t[p - 3].is("for")))) {
      decl = !next.is(")");
    } else if (prev.is(",")) {
      // `int a = 0, b;` : find the head of this declaration statement.
      std::size_t q = p - 1;
      int depth = 0;
      while (q > b) {
        const auto& tk = t[q - 1];
        if (tk.is(")") || tk.is("]") || tk.is("}")) {
          ++depth;
        } else if (tk.is("(") || tk.is("[") || tk.is("{")) {
          if (depth == 0) break;
          --depth;
        } else if (tk.is(";") && depth == 0) {
          break;
        }
        --q;
      }
      decl = t[q].is_identifier() && (is_type_keyword(t[q].text) || type_names.contains(std::string(t[q].text)));
    }
    if (decl) add(t[i].text);
  }
  return locals;
}

struct FunctionDef {
  std::size_t sig_begin;   // token index
  std::size_t name;        // token index
  std::size_t lparen;
  std::size_t rparen;
  std::size_t lbrace;
  std::size_t rbrace;
};

void measure(FunctionInfo& f, const Toks& t, const FunctionDef& d) {
  const std::size_t b = d.lbrace + 1;
  const std::size_t e = d.rbrace;
  auto& m = f.metrics;

  std::set<std::size_t> do_tails;
  for (std::size_t i = b; i < e; ++i) {
    if (!t[i].is("do")) continue;
    auto end = statement_end(t, i + 1, e);
    if (end < e && t[end].is("while")) do_tails.insert(end);
  }

  struct Raw {
    std::size_t kw;
    std::size_t body_b;
    std::size_t body_e;
    std::size_t cond_b;
    std::size_t cond_e;
    bool is_for;
  };
  std::vector<Raw> raws;
  for (std::size_t i = b; i < e; ++i) {
    if (!t[i].is_identifier()) continue;
    if (t[i].is("for") || (t[i].is("while") && !do_tails.contains(i))) {
      std::size_t lp = i + 1;
      if (lp >= e || !t[lp].is("(")) continue;
      auto rp = match_bracket(t, lp);
      if (rp == npos || rp >= e) continue;
      raws.push_back({i, rp + 1, statement_end(t, rp + 1, e), lp + 1, rp, t[i].is("for")});
    } else if (t[i].is("do")) {
      auto body_e = statement_end(t, i + 1, e);
      std::size_t cb = body_e, ce = body_e;
      if (body_e < e && t[body_e].is("while") && body_e + 1 < e && t[body_e + 1].is("(")) {
        auto rp = match_bracket(t, body_e + 1);
        if (rp != npos) {
          cb = body_e + 2;
          ce = rp;
        }
      }
      raws.push_back({i, i + 1, body_e, cb, ce, false});
    }
  }

  for (std::size_t k = 0; k < raws.size(); ++k) {
    const auto& r = raws[k];
    LoopSite loop;
    loop.ordinal = k;
    loop.keyword_offset = t[r.kw].offset;
    if (r.body_b < r.body_e) {
      loop.body = {t[r.body_b].offset, t[r.body_e - 1].end()};
      loop.braced = t[r.body_b].is("{");
    } else {
      loop.body = {t[r.kw].end(), t[r.kw].end()};
    }
    loop.depth = 1;
    for (const auto& outer : raws)
      if (&outer != &r && outer.body_b <= r.kw && r.kw < outer.body_e) ++loop.depth;

    std::size_t cb = r.cond_b, ce = r.cond_e;
    std::set<std::string> updated = updated_identifiers(t, r.body_b, r.body_e);
    if (r.is_for) {
      auto parts = split_top(t, r.cond_b, r.cond_e, ";");
      if (parts.size() == 3) {
        cb = parts[1].first;
        ce = parts[1].second;
        auto step = updated_identifiers(t, parts[2].first, parts[2].second);
        updated.insert(step.begin(), step.end());
      }
    }
    bool unbounded = true;
    if (cb < ce) {
      for (std::size_t i = cb; i < ce; ++i) {
        if (t[i].is_identifier() && !is_c_keyword(t[i].text) && updated.contains(std::string(t[i].text))) {
          unbounded = false;
          break;
        }
      }
    }
    loop.unbounded = unbounded;
    f.loops.push_back(loop);
  }

  m.loop_count = f.loops.size();
  m.max_nesting_depth = 0;
  m.has_unbounded_loop = false;
  for (const auto& l : f.loops) {
    m.max_nesting_depth = std::max(m.max_nesting_depth, l.depth);
    m.has_unbounded_loop = m.has_unbounded_loop || l.unbounded;
  }

  static const std::set<std::string_view> alloc_fns{"malloc", "calloc", "realloc", "alloca",
                                                    "aligned_alloc"};
  for (std::size_t i = b; i < e; ++i) {
    const auto& tok = t[i];
    if (tok.is_identifier()) {
      if (tok.is("if") || tok.is("case")) ++m.branch_count;
      if (alloc_fns.contains(tok.text) && i + 1 < e && t[i + 1].is("(")) ++m.dynamic_alloc_count;
      continue;
    }
    if (tok.kind != TokenKind::punct) continue;
    if (tok.is("?") || tok.is("&&") || tok.is("||")) {
      ++m.branch_count;
    } else if (tok.is("->")) {
      ++m.pointer_op_count;
    } else if (tok.is("*") || tok.is("&")) {
      if (!is_operatorish(t[i - 1])) continue;
      if (tok.is("*")) {
        std::size_t p = i;
        while (p > b && t[p - 1].is("*")) --p;
        if (p > b && t[p - 1].is_identifier() && is_type_keyword(t[p - 1].text)) continue;
      }
      ++m.pointer_op_count;
    }
  }
}

}  // namespace

ProgramModel parse_program(std::string source, const WeightTable& weights) {
  ProgramModel model;
  model.source_text = std::move(source);
  const std::string_view src = model.source_text;

  auto all = tokenize(src);
  std::set<std::string> names;
  for (const auto& tk : all) {
    if (tk.kind != TokenKind::preprocessor) continue;
    auto inner = tokenize(tk.text.substr(1));
    if (inner.size() >= 2 && inner[0].is("define") && inner[1].is_identifier())
      names.insert(std::string(inner[1].text));
  }
  Toks t;
  for (const auto& tk : all)
    if (tk.kind != TokenKind::preprocessor) t.push_back(tk);

  // Brace and paren balance over the whole unit.
  {
    int br = 0, pa = 0;
    for (const auto& tk : t) {
      if (tk.kind != TokenKind::punct) continue;
      if (tk.is("{")) ++br;
      else if (tk.is("}")) --br;
      else if (tk.is("(")) ++pa;
      else if (tk.is(")")) --pa;
      if (br < 0 || pa < 0) break;
    }
    if (br != 0 || pa != 0)
      throw ProgramParseError(ProgramParseError::Kind::unbalanced_source, "unbalanced braces or parentheses");
  }

  std::vector<FunctionDef> defs;
  std::vector<std::pair<std::size_t, std::size_t>> top_statements;
  std::size_t stmt_begin = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& tk = t[i];
    if (tk.is("(") || tk.is("[")) {
      auto m = match_bracket(t, i);
      if (m == npos)
        throw ProgramParseError(ProgramParseError::Kind::unbalanced_source, "unmatched bracket");
      i = m;
      continue;
    }
    if (tk.is(";")) {
      top_statements.emplace_back(stmt_begin, i);
      stmt_begin = i + 1;
      continue;
    }
    if (!tk.is("{")) continue;
    auto close = match_bracket(t, i);
    if (close == npos)
      throw ProgramParseError(ProgramParseError::Kind::unbalanced_source, "unmatched brace");
    // Skip attributes between the parameter list and the body.
    std::size_t k = i;
    while (k > stmt_begin && t[k - 1].is(")")) {
      auto open = match_backward(t, k - 1);
      if (open == npos || open == 0 || open < stmt_begin) break;
      if (t[open - 1].is("__attribute__")) {
        k = open - 1;
        continue;
      }
      const auto& name = t[open - 1];
      if (name.is_identifier() && !is_c_keyword(name.text)) {
        defs.push_back({stmt_begin, open - 1, open, k - 1, i, close});
        stmt_begin = close + 1;
      }
      break;
    }
    // Either a function body or a struct/enum body or initializer that is
    // part of the current statement.
    i = close;
  }

  // File-scope names and globals.
  for (auto [b, e] : top_statements) {
    for (std::size_t i = b; i < e; ++i)
      if (t[i].is_identifier() && !is_c_keyword(t[i].text)) names.insert(std::string(t[i].text));
    if (b >= e || t[b].is("typedef")) continue;
    bool prototype = false;
    {
      int depth = 0;
      for (std::size_t i = b; i < e; ++i) {
        if (t[i].is("{")) ++depth;
        else if (t[i].is("}")) --depth;
        else if (depth == 0 && t[i].is("=")) break;
        else if (depth == 0 && t[i].is("(")) {
          prototype = !(i + 1 < e && t[i + 1].is("*"));
          break;
        }
      }
    }
    if (prototype) continue;
    // Drop brace groups, then take one name per declarator.
    Toks flat;
    for (std::size_t i = b; i < e; ++i) {
      if (t[i].is("{")) {
        auto m = match_bracket(t, i);
        i = (m == npos || m > e) ? e : m;
        continue;
      }
      flat.push_back(t[i]);
    }
    for (auto [db, de] : split_top(flat, 0, flat.size(), ",")) {
      std::size_t stop = de;
      for (std::size_t i = db; i < de; ++i)
        if (flat[i].is("=") || flat[i].is("[")) {
          stop = i;
          break;
        }
      for (std::size_t i = stop; i > db; --i) {
        const auto& tk = flat[i - 1];
        if (tk.is_identifier() && !is_c_keyword(tk.text)) {
          bool tag = i - 1 > 0 && (flat[i - 2].is("struct") || flat[i - 2].is("union") || flat[i - 2].is("enum"));
          bool lone_type = (i - 1 == db) && de - db == 1;
          if (!tag && !lone_type) {
            std::string g(tk.text);
            if (std::find(model.globals.begin(), model.globals.end(), g) == model.globals.end())
              model.globals.push_back(g);
          }
          break;
        }
      }
    }
  }

  std::set<std::string> def_names;
  for (const auto& d : defs) def_names.insert(std::string(t[d.name].text));
  for (const auto& n : def_names) names.insert(n);
  model.file_scope_names.assign(names.begin(), names.end());

  std::set<std::string> type_names;
  for (auto [b, e] : top_statements)
    if (b < e && t[b].is("typedef") && e > b + 1) {
      for (std::size_t i = e; i > b; --i)
        if (t[i - 1].is_identifier() && !is_c_keyword(t[i - 1].text)) {
          type_names.insert(std::string(t[i - 1].text));
          break;
        }
    }

  const FunctionDef* main_def = nullptr;
  for (const auto& d : defs) {
    FunctionInfo f;
    f.name = std::string(t[d.name].text);
    f.signature_text = trim(src.substr(t[d.sig_begin].offset, t[d.lbrace].offset - t[d.sig_begin].offset));
    f.span = {t[d.sig_begin].offset, t[d.rbrace].end()};
    f.body_span = {t[d.lbrace].offset, t[d.rbrace].end()};
    f.params = parse_params(t, d.lparen, d.rparen);
    std::string rt;
    for (std::size_t i = d.sig_begin; i < d.name; ++i) {
      if (t[i].is("static")) {
        f.is_static = true;
        continue;
      }
      if (t[i].is("inline") || t[i].is("extern") || t[i].is("__inline")) continue;
      if (!rt.empty()) rt += ' ';
      rt += t[i].text;
    }
    f.return_type = rt;
    for (std::size_t i = d.lbrace + 1; i < d.rbrace; ++i) {
      if (t[i].is_identifier() && i + 1 < d.rbrace && t[i + 1].is("(") &&
          def_names.contains(std::string(t[i].text))) {
        std::string c(t[i].text);
        if (std::find(f.callees.begin(), f.callees.end(), c) == f.callees.end()) f.callees.push_back(c);
      }
    }
    f.locals = scan_locals(t, d.lbrace + 1, d.rbrace, type_names);
    if (f.name == "main") {
      main_def = &d;
      model.main_span = f.span;
      model.main_body_span = f.body_span;
      continue;
    }
    measure(f, t, d);
    model.functions.push_back(std::move(f));
  }
  if (main_def == nullptr) throw ProgramParseError(ProgramParseError::Kind::no_main, "no main function");

  // Recursion: strongly connected components of the call graph.
  {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < model.functions.size(); ++i) index[model.functions[i].name] = i;
    Graph g(model.functions.size());
    for (std::size_t i = 0; i < model.functions.size(); ++i)
      for (const auto& c : model.functions[i].callees)
        if (auto it = index.find(c); it != index.end()) boost::add_edge(i, it->second, g);
    std::vector<std::size_t> comp(model.functions.size());
    if (!model.functions.empty()) boost::strong_components(g, comp.data());
    std::map<std::size_t, std::size_t> comp_size;
    for (auto c : comp) ++comp_size[c];
    for (std::size_t i = 0; i < model.functions.size(); ++i) {
      auto& f = model.functions[i];
      bool self = std::find(f.callees.begin(), f.callees.end(), f.name) != f.callees.end();
      f.is_recursive = self || comp_size[comp[i]] > 1;
      f.metrics.has_recursion = f.is_recursive;
      f.metrics = score_complexity(f, weights);
    }
  }

  // System property and call sites inside main.
  const auto& d = *main_def;
  std::vector<SystemProperty> props;
  for (std::size_t i = d.lbrace + 1; i < d.rbrace; ++i) {
    const auto& tk = t[i];
    if (!tk.is_identifier() || i + 1 >= d.rbrace || !t[i + 1].is("(")) continue;
    auto rp = match_bracket(t, i + 1);
    if (rp == npos) continue;
    if (tk.is("assert") || tk.is("__ESBMC_assert")) {
      SystemProperty p;
      p.kind = tk.is("assert") ? PropertyKind::assert_call : PropertyKind::esbmc_assert;
      p.location = tk.offset;
      auto args = split_top(t, i + 2, rp, ",");
      p.assertion_text = source_text(src, t, args[0].first, args[0].second);
      props.push_back(std::move(p));
    } else if (def_names.contains(std::string(tk.text)) && !tk.is("main")) {
      CallSite c;
      c.callee = std::string(tk.text);
      c.offset = tk.offset;
      if (rp > i + 2)
        for (auto [ab, ae] : split_top(t, i + 2, rp, ",")) c.args.push_back(source_text(src, t, ab, ae));
      if (i >= 2 && t[i - 1].is("=") && t[i - 2].is_identifier() && !is_c_keyword(t[i - 2].text))
        c.assigned_to = std::string(t[i - 2].text);
      model.main_calls.push_back(std::move(c));
    }
  }
  if (props.empty()) throw ProgramParseError(ProgramParseError::Kind::no_property, "main contains no assertion");
  if (props.size() > 1)
    throw ProgramParseError(ProgramParseError::Kind::multiple_properties,
                            "main contains " + std::to_string(props.size()) + " assertions");
  model.property = std::move(props.front());
  return model;
}

std::vector<std::string> scan_write_targets(const ProgramModel& model, const FunctionInfo& f) {
  const std::string_view src = model.source_text;
  auto t = tokenize_code(src.substr(f.body_span.begin, f.body_span.size()));
  std::vector<std::string> out;
  auto add = [&](std::string s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  };
  auto is_local = [&](std::string_view n) {
    return std::find(f.locals.begin(), f.locals.end(), n) != f.locals.end();
  };
  auto pointer_param = [&](std::string_view n) {
    for (const auto& p : f.params)
      if (p.name == n) return is_pointer_param(p);
    return false;
  };
  auto writes_after = [&](std::size_t j) {
    return j < t.size() && (is_assignment_op(t[j]) || t[j].is("++") || t[j].is("--"));
  };
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& tk = t[i];
    if (tk.is("*") && i + 1 < t.size() && t[i + 1].is_identifier() && (i == 0 || is_operatorish(t[i - 1])) &&
        !(i > 0 && (t[i - 1].is("*") || (t[i - 1].is_identifier() && is_type_keyword(t[i - 1].text))))) {
      std::string_view n = t[i + 1].text;
      bool pre = i > 0 && (t[i - 1].is("++") || t[i - 1].is("--"));
      if ((writes_after(i + 2) || pre) && pointer_param(n) && !is_local(n)) add("*" + std::string(n));
      continue;
    }
    if (!tk.is_identifier() || is_c_keyword(tk.text)) continue;
    if (i > 0 && (t[i - 1].is(".") || t[i - 1].is("->"))) continue;
    std::string_view n = tk.text;
    if (is_local(n)) continue;
    bool pre = i > 0 && (t[i - 1].is("++") || t[i - 1].is("--"));
    std::size_t j = i + 1;
    std::string suffix;
    // Walk an lvalue postfix chain: a[i].f->g
    bool deref = false;
    while (j < t.size()) {
      if (t[j].is("[")) {
        auto m = match_bracket(t, j);
        if (m == npos) break;
        if (pointer_param(n)) deref = true;
        j = m + 1;
      } else if ((t[j].is(".") || t[j].is("->")) && j + 1 < t.size() && t[j + 1].is_identifier()) {
        if (t[j].is("->")) {
          deref = true;
          if (suffix.empty()) suffix = "->" + std::string(t[j + 1].text);
        }
        j += 2;
      } else {
        break;
      }
    }
    if (!(writes_after(j) || pre)) continue;
    if (model.is_global(n) && !f.has_param(n)) {
      add(std::string(n));
    } else if (pointer_param(n) && deref) {
      add(suffix.empty() ? "*" + std::string(n) : std::string(n) + suffix);
    }
  }
  return out;
}

}  // namespace compver
