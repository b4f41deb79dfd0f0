#include <doctest.h>

#include <atomic>

#include "compver/pipeline.hpp"
#include "test_support.hpp"

using namespace compver;
using namespace compver::testing;

namespace {

bool has(std::string_view text, std::string_view needle) { return text.find(needle) != std::string_view::npos; }

const std::string kIncrementContract =
    "__ESBMC_requires(x > 0);\n__ESBMC_assigns(x);\n__ESBMC_ensures(__ESBMC_return_value > x);";

std::string function_failure(const std::string& property) {
  return fail_output(property, "increment", {{"increment", 4, {{"increment::x", "1"}, {"__ESBMC_return_value", "2"}}}});
}

std::string system_failure() { return fail_output("r > 5", "main", {{"main", 8, {{"main::1::r", "5"}}}}); }

std::size_t iterations_logged(const RunLog& log, const std::string& stage) {
  std::size_t n = 0;
  for (const auto& e : log.events_of("iteration"))
    if (e.at("stage") == stage) ++n;
  return n;
}

}  // namespace

TEST_CASE("strategy and stage names") {
  CHECK(strategy_from_string("no_ice") == Strategy::no_ice);
  CHECK(strategy_from_string("pre-abstraction") == Strategy::pre_abstraction);
  CHECK_FALSE(strategy_from_string("ice"));
  CHECK(Stage{StageKind::pre_abstraction, "1b"}.label() == "pre_abstraction_phase(1b)");
  CHECK(Stage{StageKind::cegis, ""}.label() == "cegis");
}

TEST_CASE("stagnation needs identical failing sets and contracts") {
  Snapshot a{{"f"}, {{"f", "__ESBMC_ensures(x > 0);\n"}}};
  Snapshot b{{"f"}, {{"f", "__ESBMC_ensures(x > 1);\n"}}};
  Snapshot c{{"f", "g"}, {{"f", "__ESBMC_ensures(x > 0);\n"}, {"g", ""}}};
  CHECK_FALSE(detect_stagnation({a}));
  CHECK(detect_stagnation({b, a, a}));
  CHECK_FALSE(detect_stagnation({a, b}));
  CHECK_FALSE(detect_stagnation({a, c}));
  CHECK(detect_stagnation({a, a, a}, 3));
  CHECK_FALSE(detect_stagnation({b, a, a}, 3));
}

TEST_CASE("correct contract verifies at the initial stage") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{{}, {}, {kIncrementContract}}});
  ScriptedVerifier v([](const CheckRequest&) -> ScriptedReply { return pass_output(); });
  auto r = run_pipeline(m, {}, client, v);
  CHECK(r.verdict.outcome == Outcome::verified);
  CHECK(r.verdict.stage.label() == "initial");
  CHECK(r.verdict.iterations_used == 0);
  CHECK(r.verdict.system_status == VerificationStatus::pass);
  CHECK(r.verdict.per_function_status.at("increment") == VerificationStatus::pass);
  CHECK(r.verdict.contracts.at("increment").postconditions == std::vector<std::string>{"__ESBMC_return_value > x"});
  CHECK(v.calls() == 2);
  CHECK(r.log.count("verdict") == 1);
}

TEST_CASE("a relaxed contract converges on the first CEGAR iteration") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{Intent::initial, {}, {"__ESBMC_ensures(__ESBMC_return_value == x + 2);"}},
                            {Intent::relax, {}, {"__ESBMC_ensures(__ESBMC_return_value > x);"}}});
  ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
    if (r.mode == CheckMode::function && has(r.source->text, "x + 2")) return function_failure("__ESBMC_return_value == x + 2");
    return pass_output();
  });
  auto r = run_pipeline(m, {}, client, v);
  CHECK(r.verdict.outcome == Outcome::verified);
  CHECK(r.verdict.stage.label() == "cegar");
  CHECK(r.verdict.iterations_used == 1);
  CHECK(r.verdict.cegar_iterations == 1);
  auto refine = r.log.events_of("refine");
  REQUIRE(refine.size() == 1);
  CHECK(refine[0].at("direction") == "relax");
  // the failing state went into E- before the relax prompt was built
  REQUIRE(r.db.negatives_for("increment").size() == 1);
  CHECK(r.db.negatives_for("increment")[0].valuation.at("x") == "1");
  auto synth = r.log.events_of("synthesis");
  REQUIRE(synth.size() == 2);
  CHECK(has(synth[1].at("prompt").get<std::string>(), "x=1"));
  // call-site literal 5 is an admitted state once the function check passes
  CHECK(r.log.count("drop_failed_contracts") == 1);
}

TEST_CASE("stagnation triggers delta debugging") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client(
      {{{}, {}, {"__ESBMC_ensures(__ESBMC_return_value > x);\n__ESBMC_ensures(__ESBMC_return_value == x + 2);"}}});
  ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
    if (r.mode == CheckMode::function && has(r.source->text, "x + 2")) return function_failure("__ESBMC_return_value == x + 2");
    return pass_output();
  });
  auto r = run_pipeline(m, {}, client, v);
  CHECK(r.log.count("stagnation") == 1);
  auto dd = r.log.events_of("delta_debug");
  REQUIRE(dd.size() == 1);
  CHECK(dd[0].at("after") == nlohmann::json::array({"__ESBMC_return_value > x"}));
  CHECK(r.verdict.outcome == Outcome::verified);
  CHECK(r.verdict.stage.label() == "cegar");
  CHECK(r.verdict.iterations_used == 1);
  CHECK(r.verdict.contracts.at("increment").origin == ContractOrigin::delta_reduced);
}

TEST_CASE("irreducible failures escalate to CEGIS") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{Intent::cegis, {}, {kIncrementContract}},
                            {{}, {}, {"__ESBMC_ensures(__ESBMC_return_value == x + 2);"}}});
  ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
    if (r.mode == CheckMode::function && !has(r.source->text, "__ESBMC_return_value > x"))
      return function_failure("__ESBMC_return_value == x + 2");
    return pass_output();
  });
  auto r = run_pipeline(m, {}, client, v);
  auto dd = r.log.events_of("delta_debug");
  REQUIRE(dd.size() == 1);
  CHECK(dd[0].at("irreducible") == true);
  CHECK(r.verdict.outcome == Outcome::verified);
  CHECK(r.verdict.stage.label() == "cegis");
  CHECK(r.verdict.cegar_iterations == 1);
  CHECK(r.verdict.cegis_iterations == 1);
  CHECK(r.verdict.iterations_used == 2);
  CHECK(r.log.count("cegis_migrate") == 1);
}

TEST_CASE("system failures strengthen the weakest link") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{Intent::initial, {}, {"__ESBMC_ensures(__ESBMC_return_value >= 0);"}},
                            {Intent::strengthen, {}, {"__ESBMC_ensures(__ESBMC_return_value == x + 1);"}}});
  ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
    if (r.mode == CheckMode::system && !r.source->replaced.empty() && has(r.source->text, ">= 0"))
      return system_failure();
    return pass_output();
  });
  auto r = run_pipeline(m, {}, client, v);
  CHECK(r.verdict.outcome == Outcome::verified);
  CHECK(r.verdict.iterations_used == 1);
  auto refine = r.log.events_of("refine");
  REQUIRE(refine.size() == 1);
  CHECK(refine[0].at("direction") == "strengthen");
  CHECK(refine[0].at("function") == "increment");
  auto wl = r.log.events_of("weakest_link");
  REQUIRE(wl.size() == 1);
  CHECK(wl[0].at("function") == "increment");
}

TEST_CASE("budget law with an always-failing stack") {
  auto m = corpus_model("increment.c");
  std::atomic<int> n{0};
  ScriptedLlmClient client([&](const ChatRequest&) -> std::optional<std::string> {
    return "__ESBMC_ensures(__ESBMC_return_value > x - " + std::to_string(n++) + ");";
  });
  ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
    if (r.mode == CheckMode::system && r.source->replaced.empty()) return pass_output();
    return r.mode == CheckMode::system ? system_failure() : function_failure("__ESBMC_return_value > x");
  });
  auto r = run_pipeline(m, {}, client, v);
  CHECK(r.verdict.outcome == Outcome::inconclusive);
  CHECK(r.verdict.cegar_iterations == 5);
  CHECK(r.verdict.cegis_iterations == 5);
  CHECK(r.verdict.iterations_used == 10);
  CHECK(iterations_logged(r.log, "cegar") == 5);
  CHECK(iterations_logged(r.log, "cegis") == 5);
  CHECK(r.log.count("stagnation") == 0);

  PipelineConfig small;
  small.total_budget = 3;
  auto s = run_pipeline(m, small, client, v);
  CHECK(s.verdict.cegar_iterations == 3);
  CHECK(s.verdict.cegis_iterations == 0);
  CHECK(s.log.count("cegis_migrate") == 0);
}

TEST_CASE("a counterexample on concrete code falsifies") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{{}, {}, {"__ESBMC_ensures(__ESBMC_return_value == x + 2);"}}});
  ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
    if (r.mode == CheckMode::function) return function_failure("__ESBMC_return_value == x + 2");
    return r.source->replaced.empty() ? system_failure() : pass_output();
  });
  auto r = run_pipeline(m, {}, client, v);
  CHECK(r.verdict.outcome == Outcome::falsified);
  CHECK(r.verdict.system_status == VerificationStatus::fail);
  CHECK(r.log.count("concrete_refutation") == 1);
  CHECK(r.verdict.iterations_used == 0);
}

TEST_CASE("exhausted budget runs the concrete check once") {
  auto m = corpus_model("increment.c");
  std::atomic<int> n{0};
  ScriptedLlmClient client([&](const ChatRequest&) -> std::optional<std::string> {
    return "__ESBMC_ensures(__ESBMC_return_value > x - " + std::to_string(n++) + ");";
  });
  // every function check passes, so no contract is dropped before CEGAR
  ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
    if (r.mode == CheckMode::function) return pass_output();
    return r.source->replaced.empty() ? std::string("VERIFICATION FAILED\n") : system_failure();
  });
  PipelineConfig cfg;
  cfg.total_budget = 2;
  auto r = run_pipeline(m, cfg, client, v);
  CHECK(r.verdict.outcome == Outcome::inconclusive);
  std::size_t concrete = 0;
  for (const auto& e : r.log.events_of("verify"))
    if (e.contains("concrete") && e.at("concrete") == true) ++concrete;
  CHECK(concrete == 1);
  CHECK(r.verdict.system_status == VerificationStatus::fail);
}

TEST_CASE("client outage falls back to heuristic contracts") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client;
  ScriptedVerifier v([](const CheckRequest&) -> ScriptedReply { return pass_output(); });
  auto r = run_pipeline(m, {}, client, v);
  CHECK(r.verdict.outcome == Outcome::verified);
  CHECK(r.verdict.contracts.at("increment").origin == ContractOrigin::heuristic_fallback);
  CHECK(r.log.count("client_unavailable") == 1);
}

TEST_CASE("unparseable replies leave the function without a contract") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{Intent::initial, {}, {"I cannot help with that."}},
                            {Intent::relax, {}, {kIncrementContract}}});
  ScriptedVerifier v([](const CheckRequest&) -> ScriptedReply { return pass_output(); });
  auto r = run_pipeline(m, {}, client, v);
  CHECK(r.verdict.outcome == Outcome::verified);
  CHECK(r.verdict.iterations_used == 1);
  bool saw_syntax = false;
  for (const auto& e : r.log.events_of("classification"))
    if (e.at("category") == "syntax_error") saw_syntax = true;
  CHECK(saw_syntax);
  CHECK(r.db.negatives().empty());
}

TEST_CASE("tool errors never reach the example database") {
  auto m = corpus_model("increment.c");
  std::atomic<int> n{0};
  ScriptedLlmClient client([&](const ChatRequest&) -> std::optional<std::string> {
    return "__ESBMC_ensures(__ESBMC_return_value > x - " + std::to_string(n++) + ");";
  });
  ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
    if (r.mode == CheckMode::function) return std::string("Segmentation fault\n");
    if (r.source->replaced.empty()) return pass_output();
    ScriptedReply t;
    t.timed_out = true;
    return t;
  });
  auto r = run_pipeline(m, {}, client, v);
  CHECK(r.verdict.outcome == Outcome::inconclusive);
  CHECK(r.db.negatives().empty());
  CHECK(r.db.implications().empty());
}

TEST_CASE("smart-ice prompts carry example sections, no-ice prompts do not") {
  auto m = corpus_model("increment.c");
  auto script = [] {
    return [n = std::make_shared<std::atomic<int>>(0)](const ChatRequest&) -> std::optional<std::string> {
      return "__ESBMC_ensures(__ESBMC_return_value > x - " + std::to_string((*n)++) + ");";
    };
  };
  ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
    if (r.mode == CheckMode::system && r.source->replaced.empty()) return pass_output();
    return r.mode == CheckMode::system ? system_failure() : function_failure("__ESBMC_return_value > x");
  });
  auto refinement_prompts = [](const RunLog& log) {
    std::vector<std::string> out;
    for (const auto& e : log.events_of("synthesis"))
      if (e.at("intent") != "initial") out.push_back(e.at("prompt"));
    return out;
  };

  ScriptedLlmClient smart_client(script());
  auto smart = run_pipeline(m, {}, smart_client, v);
  auto sp = refinement_prompts(smart.log);
  REQUIRE_FALSE(sp.empty());
  CHECK_FALSE(smart.db.negatives().empty());
  for (const auto& p : sp) {
    CHECK(has(p, markers::positives));
    CHECK(has(p, markers::negatives));
  }

  PipelineConfig cfg;
  cfg.strategy = Strategy::no_ice;
  ScriptedLlmClient plain_client(script());
  auto plain = run_pipeline(m, cfg, plain_client, v);
  auto pp = refinement_prompts(plain.log);
  REQUIRE_FALSE(pp.empty());
  CHECK_FALSE(plain.db.negatives().empty());
  for (const auto& p : pp) {
    CHECK_FALSE(has(p, markers::positives));
    CHECK_FALSE(has(p, markers::negatives));
    CHECK(has(p, markers::raw));
  }
}

TEST_CASE("elapsed deadline propagates") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{{}, {}, {kIncrementContract}}});
  ScriptedVerifier v([](const CheckRequest&) -> ScriptedReply { return pass_output(); });
  CHECK_THROWS_AS(run_pipeline(m, {}, client, v, PromptTemplates::builtin(),
                               std::chrono::steady_clock::now() - std::chrono::seconds(1)),
                  DeadlineExceeded);
}

TEST_CASE("replayed runs produce identical verdicts and logs") {
  auto m = corpus_model("two_callers.c");
  auto run = [&] {
    ScriptedLlmClient client({{Intent::initial, std::string("square"), {"__ESBMC_ensures(__ESBMC_return_value >= 0);"}},
                              {Intent::initial, std::string("sum_squares"), {"__ESBMC_ensures(__ESBMC_return_value >= 0);"}},
                              {{}, {}, {"__ESBMC_ensures(__ESBMC_return_value == a * a + b * b);"}}});
    ScriptedVerifier v([](const CheckRequest& r) -> ScriptedReply {
      if (r.mode == CheckMode::system && has(r.source->text, "__ESBMC_return_value >= 0);\n    return square"))
        return fail_output("s == 25", "main", {{"main", 13, {{"s", "3"}}}});
      return pass_output();
    });
    auto r = run_pipeline(m, {}, client, v);
    return to_json_value(r.verdict).dump() + r.log.to_json().dump() + r.db.serialize();
  };
  auto a = run();
  CHECK(a == run());
  CHECK(a == run());
}
