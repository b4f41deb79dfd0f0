#include "compver/pipeline.hpp"

#include <algorithm>

#include "compver/delta_debug.hpp"
#include "compver/instrument.hpp"
#include "pipeline_internal.hpp"

namespace compver {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::smart_ice: return "smart-ice";
    case Strategy::no_ice: return "no-ice";
    case Strategy::pre_abstraction: return "pre-abstraction";
  }
  return "?";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
  std::string norm(s);
  std::replace(norm.begin(), norm.end(), '_', '-');
  for (auto st : {Strategy::smart_ice, Strategy::no_ice, Strategy::pre_abstraction})
    if (to_string(st) == norm) return st;
  return std::nullopt;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::verified: return "verified";
    case Outcome::falsified: return "falsified";
    case Outcome::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string Stage::label() const {
  switch (kind) {
    case StageKind::initial: return "initial";
    case StageKind::cegar: return "cegar";
    case StageKind::cegis: return "cegis";
    case StageKind::pre_abstraction: return "pre_abstraction_phase(" + phase + ")";
  }
  return "?";
}

nlohmann::json to_json_value(const Verdict& v) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [f, s] : v.per_function_status) per[f] = to_string(s);
  nlohmann::json contracts = nlohmann::json::object();
  for (const auto& [f, c] : v.contracts) contracts[f] = c;
  return {{"outcome", to_string(v.outcome)},
          {"stage", v.stage.label()},
          {"iterations_used", v.iterations_used},
          {"cegar_iterations", v.cegar_iterations},
          {"cegis_iterations", v.cegis_iterations},
          {"system_status", v.system_status ? nlohmann::json(to_string(*v.system_status)) : nlohmann::json()},
          {"per_function_status", per},
          {"contracts", contracts},
          {"stripped_assigns", v.stripped_assigns}};
}

bool detect_stagnation(const std::vector<Snapshot>& history, std::size_t window) {
  if (window < 2 || history.size() < window) return false;
  const auto& last = history.back();
  for (std::size_t i = history.size() - window; i + 1 < history.size(); ++i)
    if (!(history[i] == last)) return false;
  return true;
}

PipelineResult run_pipeline(const ProgramModel& model, const PipelineConfig& cfg, LlmClient& client,
                            Verifier& verifier, const PromptTemplates& templates, Deadline deadline) {
  detail::Pipeline p(model, cfg, client, verifier, templates, deadline);
  return p.run();
}

namespace detail {

namespace {

nlohmann::json names_json(const std::vector<std::string>& v) { return nlohmann::json(v); }

}  // namespace

Pipeline::Pipeline(const ProgramModel& model, const PipelineConfig& cfg, LlmClient& client, Verifier& verifier,
                   const PromptTemplates& templates, Deadline deadline)
    : model_(model),
      cfg_(cfg),
      client_(client),
      verifier_(verifier),
      templates_(templates),
      deadline_(deadline),
      synth_(client, templates, &log_, cfg.synthesis) {}

PipelineResult Pipeline::run() {
  log_.event("start", {{"strategy", to_string(cfg_.strategy)},
                       {"functions", names_json(function_names())},
                       {"property", model_.property.assertion_text}});
  try {
    return cfg_.strategy == Strategy::pre_abstraction ? pre_abstraction() : standard();
  } catch (const ConcreteRefutation&) {
    return conclude(Outcome::falsified);
  }
}

void Pipeline::enter(Stage s) {
  stage_ = std::move(s);
  log_.event("stage", {{"stage", stage_.label()}});
}

void Pipeline::check_deadline() const {
  if (deadline_ && std::chrono::steady_clock::now() >= *deadline_)
    throw DeadlineExceeded("program deadline elapsed");
}

std::vector<std::string> Pipeline::function_names() const { return model_.function_names(); }

PipelineResult Pipeline::standard() {
  enter({StageKind::initial, ""});
  auto part = partition_functions(model_, cfg_.tau);
  log_.event("derive_sets", {{"low", part.low}, {"high", part.high}, {"tau", cfg_.tau}});
  initial_synthesis(function_names());
  if (verify_all()) return conclude(Outcome::verified);
  return refine_and_conclude();
}

PipelineResult Pipeline::refine_and_conclude() {
  // Surviving contracts: those whose own check passed. Dropped functions stay concrete.
  ContractSet survivors;
  for (const auto& [f, c] : contracts_)
    if (functions_.at(f).passed()) survivors.emplace(f, c);
  std::vector<std::string> dropped;
  for (const auto& [f, c] : contracts_)
    if (!survivors.contains(f)) dropped.push_back(f);
  log_.event("drop_failed_contracts", {{"dropped", dropped}});
  if (survivors.size() != contracts_.size()) system_ = check_system(survivors, "surviving_contracts");

  if (run_cegar()) return conclude(Outcome::verified);
  if (run_cegis()) return conclude(Outcome::verified);
  if (!concrete_checked_) check_system({}, "final_concrete");
  return conclude(Outcome::inconclusive);
}

PipelineResult Pipeline::conclude(Outcome outcome) {
  Verdict v;
  v.outcome = outcome;
  v.stage = stage_;
  v.cegar_iterations = cegar_;
  v.cegis_iterations = cegis_;
  v.iterations_used = cegar_ + cegis_;
  if (system_) v.system_status = system_->status;
  for (const auto& [f, r] : functions_) v.per_function_status[f] = r.status;
  v.contracts = contracts_;
  for (const auto& e : log_.events_of("assigns_stripped"))
    for (const auto& t : e.at("targets")) v.stripped_assigns.push_back(e.at("function").get<std::string>() + ": " + t.get<std::string>());
  log_.event("verdict", to_json_value(v));
  return {std::move(v), log_, cegis_db_ ? *cegis_db_ : db_};
}

// Synthesis ------------------------------------------------------------------

std::optional<Contract> Pipeline::synthesize_or_fallback(SynthesisRequest req, bool cegis) {
  check_deadline();
  const auto& f = *req.function;
  try {
    auto r = cegis ? synth_.cegis_synthesize(req, *cegis_db_) : synth_.synthesize(req);
    if (auto* c = std::get_if<Contract>(&r)) return *c;
    if (!contracts_.contains(f.name)) missing_[f.name] = std::get<ParseFailure>(r).message();
    return std::nullopt;
  } catch (const ClientUnavailable& e) {
    log_.event("client_unavailable", {{"function", f.name}, {"intent", to_string(req.intent)}, {"error", e.what()}});
    if (req.intent != Intent::initial) return std::nullopt;
    std::vector<std::string> stripped;
    auto c = heuristic_fallback(f, model_, &stripped);
    log_.event("fallback", {{"function", f.name}, {"reason", e.what()}, {"contract", c.text()}});
    if (!stripped.empty()) log_.event("assigns_stripped", {{"function", f.name}, {"targets", stripped}});
    return c;
  }
}

void Pipeline::adopt(const std::string& f, const ContractParse& parsed) {
  if (const auto* c = std::get_if<Contract>(&parsed)) {
    contracts_[f] = *c;
    missing_.erase(f);
  } else {
    missing_[f] = std::get<ParseFailure>(parsed).message();
  }
}

void Pipeline::initial_synthesis(const std::vector<std::string>& names) {
  for (const auto& f : names) {
    SynthesisRequest req;
    req.intent = Intent::initial;
    req.function = &model_.at(f);
    req.model = &model_;
    if (auto c = synthesize_or_fallback(req, false)) adopt(f, *c);
  }
}

// Checks ---------------------------------------------------------------------

VerificationResult Pipeline::check_system(const ContractSet& contracts, std::string_view label) {
  check_deadline();
  auto src = render_replace(model_, contracts);
  auto r = verifier_.verify_system(src, deadline_);
  auto reachable = model_.reachable_from_main();
  bool concrete = std::none_of(src.replaced.begin(), src.replaced.end(), [&](const std::string& f) {
    return std::find(reachable.begin(), reachable.end(), f) != reachable.end();
  });
  nlohmann::json ev{{"stage", stage_.label()},
                    {"check", label},
                    {"mode", "system"},
                    {"replaced", src.replaced},
                    {"concrete", concrete},
                    {"status", to_string(r.status)},
                    {"key", fixture_key(CheckMode::system, "", src.text)}};
  if (!r.reason.empty()) ev["reason"] = r.reason;
  log_.event("verify", std::move(ev));
  if (label != "final_concrete") system_text_ = src.text;
  if (concrete) {
    concrete_checked_ = true;
    if (r.status == VerificationStatus::fail && r.parsed) {
      log_.event("concrete_refutation", {{"property", r.parsed->violated_property}});
      if (label == "final_concrete") system_text_ = src.text;
      system_ = r;
      throw ConcreteRefutation{};
    }
  }
  return r;
}

VerificationResult Pipeline::check_function(const std::string& f) {
  check_deadline();
  VerificationResult r;
  std::string text;
  auto it = contracts_.find(f);
  if (it == contracts_.end()) {
    r.status = VerificationStatus::tool_error;
    r.mode = CheckMode::function;
    r.function = f;
    auto why = missing_.find(f);
    r.reason = why != missing_.end() ? reason::contract_parse : reason::no_contract;
    r.raw_output = why != missing_.end() ? "contract rejected: " + why->second + "\n" : "no contract\n";
  } else {
    try {
      auto src = render_enforce(model_, it->second);
      text = src.text;
      r = verifier_.verify_function(src, f, deadline_);
    } catch (const InstrumentError& e) {
      r.status = VerificationStatus::tool_error;
      r.mode = CheckMode::function;
      r.function = f;
      r.reason = reason::internal;
      r.raw_output = e.what();
    }
  }
  nlohmann::json ev{{"stage", stage_.label()}, {"mode", "function"}, {"function", f}, {"status", to_string(r.status)}};
  if (!text.empty()) ev["key"] = fixture_key(CheckMode::function, f, text);
  if (!r.reason.empty()) ev["reason"] = r.reason;
  log_.event("verify", std::move(ev));
  functions_[f] = r;
  function_texts_[f] = text;
  return r;
}

bool Pipeline::verify_all() {
  system_ = check_system(contracts_, "all_contracts");
  for (const auto& f : function_names()) check_function(f);
  return all_pass();
}

bool Pipeline::all_pass() const {
  if (!system_ || !system_->passed()) return false;
  return std::all_of(functions_.begin(), functions_.end(), [](const auto& kv) { return kv.second.passed(); });
}

std::vector<std::string> Pipeline::failing_functions() const {
  std::vector<std::string> out;
  for (const auto& f : function_names()) {
    auto it = functions_.find(f);
    if (it != functions_.end() && !it->second.passed()) out.push_back(f);
  }
  return out;
}

Snapshot Pipeline::snapshot() const {
  Snapshot s;
  s.failing = failing_functions();
  const bool system_failing = system_ && !system_->passed();
  for (const auto& f : s.failing) {
    auto it = contracts_.find(f);
    s.contract_texts[f] = it == contracts_.end() ? "<none>" : it->second.text();
  }
  if (system_failing) {
    s.failing.emplace_back(kSystemEntry);
    for (const auto& [f, c] : contracts_) s.contract_texts[f] = c.text();
  }
  return s;
}

// Counterexample handling ------------------------------------------------------

void Pipeline::absorb(IceDatabase& db, std::string_view provenance) {
  const bool smart = cfg_.strategy != Strategy::no_ice;
  const std::string prov(provenance);
  auto log_db = [&](std::string_view op, const std::string& f, AdmitOutcome o) {
    log_.event("db", {{"op", op}, {"function", f}, {"outcome", to_string(o)}});
  };
  for (const auto& f : function_names()) {
    const auto& r = functions_.at(f);
    const auto& fi = model_.at(f);
    if (r.passed()) {
      for (auto& ex : call_site_positives(model_, fi, prov)) log_db("positive", f, db.record_positive(std::move(ex)));
      continue;
    }
    auto cls = classify(r, function_texts_[f]);
    log_.event("classification", {{"function", f}, {"level", to_string(cls.level)}, {"category", to_string(cls.category)}});
    if (r.parsed) {
      if (cls.admissible()) log_db("negative", f, db.admit(cls, negative_example(*r.parsed, fi, model_, prov)));
      for (auto& imp : extract_implications(*r.parsed, fi, prov)) log_db("implication", f, db.add_implication(std::move(imp)));
    }
    DiagnosticOptions opts{cfg_.diagnostic_limit, f};
    diagnostics_[f] = smart ? render_diagnostics(db, r.parsed ? &*r.parsed : nullptr, cls, opts) : render_raw_diagnostics(r);
  }

  diagnostics_.erase(std::string(kSystemEntry));
  if (!system_ || system_->passed()) return;
  auto cls = classify(*system_, system_text_);
  log_.event("classification", {{"function", kSystemEntry}, {"level", to_string(cls.level)}, {"category", to_string(cls.category)}});
  std::optional<std::string> weakest;
  if (system_->parsed) {
    try {
      weakest = weakest_link(*system_->parsed, contracts_, model_);
      nlohmann::json scores = nlohmann::json::array();
      for (const auto& g : gap_scores(*system_->parsed, contracts_, model_))
        scores.push_back({{"function", g.function}, {"gap", g.gap}});
      log_.event("weakest_link", {{"function", *weakest}, {"scores", scores}});
      if (cls.admissible()) log_db("negative", *weakest, db.admit(cls, negative_example(*system_->parsed, model_.at(*weakest), model_, prov)));
    } catch (const NoResponsibleFunction&) {
      log_.event("weakest_link", {{"function", nullptr}});
    }
  }
  DiagnosticOptions opts{cfg_.diagnostic_limit, weakest};
  diagnostics_[std::string(kSystemEntry)] =
      smart ? render_diagnostics(db, system_->parsed ? &*system_->parsed : nullptr, cls, opts)
            : render_raw_diagnostics(*system_);
  weakest_ = weakest;
}

std::vector<std::string> Pipeline::strengthen_targets(const std::set<std::string>& exclude) const {
  std::vector<std::string> out;
  if (weakest_) {
    if (!exclude.contains(*weakest_)) out.push_back(*weakest_);
    return out;
  }
  for (const auto& [f, c] : contracts_)
    if (!exclude.contains(f)) out.push_back(f);
  return out;
}

void Pipeline::cegar_refine() {
  weakest_.reset();
  absorb(db_, "cegar" + std::to_string(cegar_));
  std::set<std::string> relaxed;
  for (const auto& f : failing_functions()) {
    SynthesisRequest req;
    req.intent = Intent::relax;
    req.function = &model_.at(f);
    req.model = &model_;
    if (auto it = contracts_.find(f); it != contracts_.end()) req.current_contract = it->second;
    req.diagnostics = diagnostics_[f];
    log_.event("refine", {{"direction", "relax"}, {"function", f}, {"iteration", cegar_}});
    if (auto c = synthesize_or_fallback(req, false)) adopt(f, *c);
    relaxed.insert(f);
  }
  if (!system_ || system_->passed()) return;
  for (const auto& f : strengthen_targets(relaxed)) {
    SynthesisRequest req;
    req.intent = Intent::strengthen;
    req.function = &model_.at(f);
    req.model = &model_;
    if (auto it = contracts_.find(f); it != contracts_.end()) req.current_contract = it->second;
    req.diagnostics = diagnostics_[std::string(kSystemEntry)];
    log_.event("refine", {{"direction", "strengthen"}, {"function", f}, {"iteration", cegar_}});
    if (auto c = synthesize_or_fallback(req, false)) adopt(f, *c);
  }
}

void Pipeline::delta_debug_stagnating() {
  for (const auto& f : failing_functions()) {
    auto it = contracts_.find(f);
    if (it == contracts_.end()) continue;
    ContractCheck check = [&](const Contract& c) {
      check_deadline();
      auto src = render_enforce(model_, c);
      auto r = verifier_.verify_function(src, f, deadline_);
      log_.event("verify", {{"stage", stage_.label()},
                            {"check", "delta_debug"},
                            {"mode", "function"},
                            {"function", f},
                            {"status", to_string(r.status)},
                            {"key", fixture_key(CheckMode::function, f, src.text)}});
      return r.passed();
    };
    DeltaDebugStats stats;
    try {
      auto reduced = delta_debug(it->second, check, &stats);
      log_.event("delta_debug", {{"function", f},
                                 {"before", it->second.postconditions},
                                 {"after", reduced.postconditions},
                                 {"checks", stats.checks}});
      it->second = std::move(reduced);
    } catch (const IrreducibleFailure& e) {
      log_.event("delta_debug", {{"function", f}, {"irreducible", true}, {"checks", stats.checks}});
    } catch (const std::invalid_argument&) {
      log_.event("delta_debug", {{"function", f}, {"already_passing", true}, {"checks", stats.checks}});
    }
  }
}

bool Pipeline::budget_left() const { return cegar_ + cegis_ < cfg_.total_budget; }

bool Pipeline::run_cegar() {
  enter({StageKind::cegar, ""});
  history_.assign(1, snapshot());
  for (std::size_t k = 1; k <= cfg_.k_cegar && budget_left(); ++k) {
    ++cegar_;
    log_.event("iteration", {{"stage", "cegar"}, {"k", k}});
    cegar_refine();
    if (verify_all()) return true;
    history_.push_back(snapshot());
    if (detect_stagnation(history_, cfg_.stagnation_window)) {
      log_.event("stagnation", {{"k", k}, {"failing", history_.back().failing}});
      delta_debug_stagnating();
      return verify_all();
    }
  }
  return false;
}

void Pipeline::cegis_synthesize_round() {
  const bool smart = cfg_.strategy != Strategy::no_ice;
  std::vector<std::string> targets = failing_functions();
  if (system_ && !system_->passed())
    for (const auto& f : strengthen_targets({}))
      if (std::find(targets.begin(), targets.end(), f) == targets.end()) targets.push_back(f);
  for (const auto& f : targets) {
    SynthesisRequest req;
    req.intent = Intent::cegis;
    req.function = &model_.at(f);
    req.model = &model_;
    if (auto it = contracts_.find(f); it != contracts_.end()) req.current_contract = it->second;
    const auto& fr = functions_.at(f);
    const std::string key = fr.passed() ? std::string(kSystemEntry) : f;
    req.diagnostics = diagnostics_.contains(key) ? diagnostics_[key] : std::string("(none)");
    if (smart) {
      req.cegis_examples = render_example_sections(*cegis_db_, {cfg_.diagnostic_limit, f});
    } else {
      req.cegis_examples = fr.passed() && system_ ? render_raw_diagnostics(*system_) : render_raw_diagnostics(fr);
    }
    log_.event("refine", {{"direction", "cegis"}, {"function", f}, {"iteration", cegis_}});
    if (auto c = synthesize_or_fallback(req, true)) adopt(f, *c);
  }
}

bool Pipeline::run_cegis() {
  if (!budget_left()) return false;
  enter({StageKind::cegis, ""});
  cegis_db_ = db_;
  log_.event("cegis_migrate", {{"positives", db_.positives().size()},
                               {"negatives", db_.negatives().size()},
                               {"implications", db_.implications().size()}});
  for (std::size_t k = 1; k <= cfg_.k_cegis && budget_left(); ++k) {
    ++cegis_;
    log_.event("iteration", {{"stage", "cegis"}, {"k", k}});
    weakest_.reset();
    absorb(*cegis_db_, "cegis" + std::to_string(cegis_));
    cegis_synthesize_round();
    if (verify_all()) return true;
  }
  return false;
}

}  // namespace detail
}  // namespace compver
