#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "compver/instrument.hpp"
#include "pipeline_internal.hpp"

namespace compver::detail {

void Pipeline::concurrent_synthesis(const std::vector<std::string>& names, bool abstraction, std::string_view phase) {
  check_deadline();
  struct Slot {
    RunLog log;
    std::optional<ContractParse> result;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < names.size();) {
      auto& slot = slots[i];
      try {
        const auto& f = model_.at(names[i]);
        auto scfg = cfg_.synthesis;
        scfg.coverage_check = !abstraction;
        Synthesizer local(client_, templates_, &slot.log, scfg);
        if (abstraction) {
          slot.result = local.overapproximate(f, model_);
          continue;
        }
        SynthesisRequest req;
        req.intent = Intent::initial;
        req.function = &f;
        req.model = &model_;
        try {
          slot.result = local.synthesize(req);
        } catch (const ClientUnavailable& e) {
          std::vector<std::string> stripped;
          auto c = heuristic_fallback(f, model_, &stripped);
          slot.log.event("fallback", {{"function", f.name}, {"reason", e.what()}, {"contract", c.text()}});
          if (!stripped.empty()) slot.log.event("assigns_stripped", {{"function", f.name}, {"targets", stripped}});
          slot.result = c;
        }
      } catch (...) {
        slot.error = std::current_exception();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(cfg_.workers, 1, std::max<std::size_t>(names.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < names.size(); ++i) {
    if (slots[i].error) std::rethrow_exception(slots[i].error);
    log_.append(slots[i].log);
    if (slots[i].result) adopt(names[i], *slots[i].result);
  }
  log_.event("phase_done", {{"phase", phase}, {"functions", names}});
}

PipelineResult Pipeline::pre_abstraction() {
  enter({StageKind::pre_abstraction, "1a"});
  auto part = partition_functions(model_, cfg_.tau);
  std::sort(part.low.begin(), part.low.end());
  std::sort(part.high.begin(), part.high.end());
  log_.event("derive_sets", {{"low", part.low}, {"high", part.high}, {"tau", cfg_.tau}});
  concurrent_synthesis(part.high, true, "1a");

  enter({StageKind::pre_abstraction, "1b"});
  concurrent_synthesis(part.low, false, "1b");

  enter({StageKind::pre_abstraction, "2"});
  system_ = check_system(contracts_, "phase2");

  enter({StageKind::pre_abstraction, "3"});
  for (const auto& f : function_names()) check_function(f);
  if (all_pass()) return conclude(Outcome::verified);

  enter({StageKind::pre_abstraction, "4"});
  for (const auto& f : part.high) {
    if (!functions_.at(f).passed()) continue;
    SynthesisRequest req;
    req.intent = Intent::initial;
    req.function = &model_.at(f);
    req.model = &model_;
    if (auto it = contracts_.find(f); it != contracts_.end()) req.current_contract = it->second;
    std::optional<Contract> candidate;
    try {
      check_deadline();
      auto r = synth_.synthesize(req);
      if (auto* c = std::get_if<Contract>(&r)) candidate = *c;
    } catch (const ClientUnavailable& e) {
      log_.event("client_unavailable", {{"function", f}, {"intent", "initial"}, {"error", e.what()}});
    }
    if (!candidate) {
      log_.event("substitution", {{"function", f}, {"accepted", false}, {"reason", "no candidate"}});
      continue;
    }
    check_deadline();
    auto src = render_enforce(model_, *candidate);
    auto r = verifier_.verify_function(src, f, deadline_);
    log_.event("verify", {{"stage", stage_.label()},
                          {"check", "substitution"},
                          {"mode", "function"},
                          {"function", f},
                          {"status", to_string(r.status)},
                          {"key", fixture_key(CheckMode::function, f, src.text)}});
    const bool ok = r.passed();
    log_.event("substitution", {{"function", f}, {"accepted", ok}, {"contract", candidate->text()}});
    if (ok) contracts_[f] = *candidate;
  }

  enter({StageKind::pre_abstraction, "5"});
  if (verify_all()) return conclude(Outcome::verified);
  return refine_and_conclude();
}

}  // namespace compver::detail
