#include <doctest.h>

#include "compver/llm_client.hpp"
#include "compver/synthesis.hpp"
#include "test_support.hpp"

using namespace compver;
using namespace compver::testing;

namespace {

SynthesisRequest request(Intent i, const ProgramModel& m, const std::string& f) {
  SynthesisRequest r;
  r.intent = i;
  r.function = &m.at(f);
  r.model = &m;
  return r;
}

}  // namespace

TEST_CASE("intent names and markers") {
  CHECK(to_string(Intent::overapproximate) == "overapproximate");
  CHECK(intent_from_string("cegis") == Intent::cegis);
  CHECK_FALSE(intent_from_string("bogus"));
  CHECK(intent_marker(Intent::relax) == "[INTENT:RELAX]");
}

TEST_CASE("every intent renders with its marker and slots filled") {
  auto m = corpus_model("increment.c");
  auto t = PromptTemplates::builtin();
  for (auto i : {Intent::initial, Intent::overapproximate, Intent::relax, Intent::strengthen, Intent::cegis}) {
    auto r = request(i, m, "increment");
    r.diagnostics = "DIAG";
    r.cegis_examples = "EXAMPLES";
    auto text = t.render(r);
    INFO(to_string(i));
    CHECK(text.find(intent_marker(i)) == 0);
    CHECK(text.find("int increment(int x)") != std::string::npos);
    CHECK(text.find("r > 5") != std::string::npos);
    CHECK(text.find("{function_name}") == std::string::npos);
    CHECK(text.find(markers::positives) == std::string::npos);
  }
}

TEST_CASE("refinement intents need diagnostics, cegis needs examples") {
  auto m = corpus_model("increment.c");
  auto t = PromptTemplates::builtin();
  CHECK_THROWS_AS(t.render(request(Intent::relax, m, "increment")), std::invalid_argument);
  CHECK_THROWS_AS(t.render(request(Intent::strengthen, m, "increment")), std::invalid_argument);
  auto c = request(Intent::cegis, m, "increment");
  c.diagnostics = "d";
  CHECK_THROWS_AS(t.render(c), std::invalid_argument);
}

TEST_CASE("template overrides must keep their marker") {
  TempDir dir;
  write_file_atomic(dir / "relax.txt", "[INTENT:RELAX]\nshort {function_name} {diagnostics}\n");
  auto t = PromptTemplates::load(dir.path());
  auto m = corpus_model("increment.c");
  auto r = request(Intent::relax, m, "increment");
  r.diagnostics = "D";
  CHECK(t.render(r) == "[INTENT:RELAX]\nshort increment D\n");
  CHECK(t.text(Intent::initial) == PromptTemplates::builtin().text(Intent::initial));
  write_file_atomic(dir / "cegis.txt", "no marker\n");
  CHECK_THROWS_AS(PromptTemplates::load(dir.path()), std::invalid_argument);
}

TEST_CASE("call context lists the call sites") {
  auto m = corpus_model("two_callers.c");
  auto ctx = call_context(m, m.at("sum_squares"));
  CHECK(ctx.find("sum_squares(3, 4)") != std::string::npos);
}

TEST_CASE("scripted client rules walk then repeat") {
  ScriptedLlmClient c({{Intent::initial, std::string("f"), {"a", "b"}}, {std::nullopt, std::nullopt, {"any"}}});
  ChatRequest r{"p", Intent::initial, "f"};
  CHECK(c.complete(r).text == "a");
  CHECK(c.complete(r).text == "b");
  CHECK(c.complete(r).text == "b");
  CHECK(c.complete({"p", Intent::relax, "f"}).text == "any");
  CHECK(c.calls() == 4);
  ScriptedLlmClient none;
  CHECK_THROWS_AS(none.complete(r), ClientUnavailable);
}

TEST_CASE("scripted client from json") {
  auto c = ScriptedLlmClient::from_json(nlohmann::json::parse(
      R"({"rules": [{"intent": "relax", "function": "g", "reply": "R"}, {"replies": ["X", "Y"]}]})"));
  CHECK(c.complete({"", Intent::relax, "g"}).text == "R");
  CHECK(c.complete({"", Intent::initial, "g"}).text == "X");
}

TEST_CASE("replay store records on miss and answers later") {
  TempDir dir;
  auto store = std::make_shared<TranscriptStore>(dir.path());
  auto upstream = std::make_shared<ScriptedLlmClient>(std::vector<ScriptedLlmClient::Rule>{{{}, {}, {"reply-1"}}});
  ReplayLlmClient recording(store, upstream);
  CHECK(recording.complete({"prompt A", Intent::initial, "f"}).text == "reply-1");
  CHECK(store->size() == 1);
  ReplayLlmClient replay(store);
  CHECK(replay.complete({"prompt A", Intent::initial, "f"}).text == "reply-1");
  CHECK_THROWS_AS(replay.complete({"prompt B", Intent::initial, "f"}), ClientUnavailable);
  auto t = store->find(prompt_digest("prompt A"));
  REQUIRE(t);
  CHECK(t->prompt == "prompt A");
  CHECK_FALSE(t->timestamp.empty());
}

TEST_CASE("live client needs configuration") {
  unsetenv("COMPVER_LLM_ENDPOINT");
  CHECK_THROWS_AS(LiveClientConfig::from_env(), ClientUnavailable);
}

TEST_CASE("synthesis parses and sets origin") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{{}, {}, {"__ESBMC_requires(x > 0);\n__ESBMC_ensures(__ESBMC_return_value > x);"}}});
  RunLog log;
  Synthesizer s(client, PromptTemplates::builtin(), &log);
  auto r = s.synthesize(request(Intent::initial, m, "increment"));
  REQUIRE(std::holds_alternative<Contract>(r));
  CHECK(std::get<Contract>(r).origin == ContractOrigin::llm_precise);
  CHECK(log.count("synthesis") == 1);
}

TEST_CASE("parse failures retry with feedback, then give up") {
  auto m = corpus_model("increment.c");
  std::vector<std::string> prompts;
  ScriptedLlmClient client([&](const ChatRequest& r) -> std::optional<std::string> {
    prompts.push_back(r.prompt);
    return "__ESBMC_ensures(bogus > 0);";
  });
  RunLog log;
  Synthesizer s(client, PromptTemplates::builtin(), &log);
  auto r = s.synthesize(request(Intent::initial, m, "increment"));
  REQUIRE(std::holds_alternative<ParseFailure>(r));
  CHECK(std::get<ParseFailure>(r).reason == ParseFailureReason::unknown_identifier);
  CHECK(prompts.size() == 3);
  CHECK(prompts[0].find("previous reply was rejected") == std::string::npos);
  CHECK(prompts[1].find("previous reply was rejected: unknown_identifier") != std::string::npos);
}

TEST_CASE("a retry can recover") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{{}, {}, {"nothing useful", "__ESBMC_ensures(__ESBMC_return_value == x + 1);"}}});
  Synthesizer s(client, PromptTemplates::builtin());
  CHECK(std::holds_alternative<Contract>(s.synthesize(request(Intent::initial, m, "increment"))));
  CHECK(client.calls() == 2);
}

TEST_CASE("dereferencing assigns are stripped and logged") {
  auto m = corpus_model("swap_ptr.c");
  ScriptedLlmClient client({{{}, {}, {"__ESBMC_assigns(*a, *b);\n__ESBMC_ensures(1);"}}});
  RunLog log;
  Synthesizer s(client, PromptTemplates::builtin(), &log);
  auto c = std::get<Contract>(s.synthesize(request(Intent::initial, m, "swap")));
  CHECK(c.assigns.empty());
  auto ev = log.events_of("assigns_stripped");
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].at("targets") == nlohmann::json::array({"*a", "*b"}));
}

TEST_CASE("coverage check retries once, then warns") {
  auto m = corpus_model("increment.c");
  ScriptedLlmClient client({{{}, {}, {"__ESBMC_ensures(1 == 1);"}}});
  RunLog log;
  SynthesisConfig cfg;
  cfg.coverage_check = true;
  Synthesizer s(client, PromptTemplates::builtin(), &log, cfg);
  auto r = s.synthesize(request(Intent::initial, m, "increment"));
  CHECK(std::holds_alternative<Contract>(r));
  CHECK(client.calls() == 2);
  CHECK(log.count("coverage_warning") == 1);

  auto vars = coverage_variables(m.at("increment"), m);
  CHECK(vars == std::vector<std::string>{"x", "__ESBMC_return_value"});
}

TEST_CASE("overapproximation falls back when the client is gone") {
  auto m = corpus_model("global_counter.c");
  ScriptedLlmClient client;
  RunLog log;
  Synthesizer s(client, PromptTemplates::builtin(), &log);
  auto c = s.overapproximate(m.at("bump"), m);
  CHECK(c.origin == ContractOrigin::heuristic_fallback);
  CHECK(c.postconditions == std::vector<std::string>{"1"});
  CHECK(c.assigns == std::vector<std::string>{"counter"});
  CHECK(log.count("fallback") == 1);
}

TEST_CASE("overapproximation origin") {
  auto m = corpus_model("factorial_rec.c");
  ScriptedLlmClient client({{{}, {}, {"__ESBMC_ensures(__ESBMC_return_value >= 1);"}}});
  Synthesizer s(client, PromptTemplates::builtin());
  CHECK(s.overapproximate(m.at("fact"), m).origin == ContractOrigin::llm_abstraction);
}

TEST_CASE("cegis replies are checked against the examples") {
  auto m = corpus_model("increment.c");
  IceDatabase db;
  db.record_positive(make_example("increment", {{"x", "5"}}));
  db.admit({ClassLevel::semantic_level, Category::semantic}, make_example("increment", {{"x", "-1"}}));
  ScriptedLlmClient client({{{}, {}, {"__ESBMC_requires(x > 10);\n__ESBMC_ensures(__ESBMC_return_value > x);"}}});
  RunLog log;
  Synthesizer s(client, PromptTemplates::builtin(), &log);
  auto req = request(Intent::cegis, m, "increment");
  req.diagnostics = "d";
  req.cegis_examples = "e";
  auto r = s.cegis_synthesize(req, db);
  REQUIRE(std::holds_alternative<Contract>(r));
  CHECK(std::get<Contract>(r).origin == ContractOrigin::cegis);
  CHECK(log.count("example_inconsistent") == 1);
  CHECK_THROWS_AS(s.cegis_synthesize(request(Intent::initial, m, "increment"), db), std::invalid_argument);

  Contract good;
  good.function_name = "increment";
  good.preconditions = {"x > 0"};
  CHECK(example_violations(good, db).empty());
}
