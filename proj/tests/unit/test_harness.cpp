#include <doctest.h>

#include <atomic>
#include <thread>

#include "compver/harness.hpp"
#include "test_support.hpp"

using namespace compver;
using namespace compver::testing;
using namespace std::chrono_literals;

namespace {

bool has(std::string_view text, std::string_view needle) { return text.find(needle) != std::string_view::npos; }

std::string increment_failure() {
  return fail_output("__ESBMC_return_value == x + 2", "increment",
                     {{"increment", 4, {{"increment::x", "1"}, {"__ESBMC_return_value", "2"}}}});
}

// Behaviour keyed on the program's file stem.
Stack stack_for(const std::filesystem::path& p) {
  const auto stem = p.stem().string();
  Stack s;
  auto counter = std::make_shared<std::atomic<int>>(0);
  if (stem == "relax") {
    s.client = std::make_shared<ScriptedLlmClient>(std::vector<ScriptedLlmClient::Rule>{
        {Intent::initial, {}, {"__ESBMC_ensures(__ESBMC_return_value == x + 2);"}},
        {Intent::relax, {}, {"__ESBMC_ensures(__ESBMC_return_value > x);"}}});
  } else {
    s.client = std::make_shared<ScriptedLlmClient>([counter](const ChatRequest&) -> std::optional<std::string> {
      return "__ESBMC_ensures(__ESBMC_return_value > x - " + std::to_string((*counter)++) + ");";
    });
  }
  s.verifier = std::make_shared<ScriptedVerifier>([stem](const CheckRequest& r) -> ScriptedReply {
    if (stem == "ok") return pass_output();
    if (stem == "relax")
      return r.mode == CheckMode::function && has(r.source->text, "x + 2") ? ScriptedReply(increment_failure())
                                                                           : ScriptedReply(pass_output());
    if (stem == "slow") {
      std::this_thread::sleep_for(1200ms);
      return pass_output();
    }
    if (r.mode == CheckMode::function) return increment_failure();
    if (stem == "sysonly" || r.source->replaced.empty()) return pass_output();
    return fail_output("r > 5", "main", {{"main", 8, {{"main::1::r", "5"}}}});
  });
  return s;
}

HarnessConfig quick() {
  HarnessConfig c;
  c.pipeline.total_budget = 2;
  c.pipeline.timeout_s = 1.0;
  return c;
}

}  // namespace

TEST_CASE("outcome classification") {
  Verdict v;
  v.outcome = Outcome::verified;
  CHECK(classify_outcome(v) == RunOutcome::converged);
  v.outcome = Outcome::inconclusive;
  v.system_status = VerificationStatus::pass;
  v.per_function_status = {{"f", VerificationStatus::pass}, {"g", VerificationStatus::fail}};
  CHECK(classify_outcome(v) == RunOutcome::system_only);
  v.system_status = VerificationStatus::fail;
  CHECK(classify_outcome(v) == RunOutcome::failed);
  v.outcome = Outcome::falsified;
  CHECK(classify_outcome(v) == RunOutcome::failed);
  CHECK(to_string(RunOutcome::system_only) == "system_only");
}

TEST_CASE("profiles") {
  CHECK(HarnessConfig{}.pipeline.timeout_s == kDefaultTimeoutS);
  CHECK(HarnessConfig::verifythis_profile().pipeline.timeout_s == kVerifyThisTimeoutS);
}

TEST_CASE("setup errors are failed runs, not exceptions") {
  TempDir dir;
  auto missing = run_program(dir / "nope.c", quick(), stack_for);
  CHECK(missing.outcome == RunOutcome::failed);
  CHECK_FALSE(missing.error.empty());
  CHECK_FALSE(missing.verdict);

  write_file_atomic(dir / "nomain.c", "int f(void) { return 0; }\n");
  auto bad = run_program(dir / "nomain.c", quick(), stack_for);
  CHECK(bad.outcome == RunOutcome::failed);
  CHECK_FALSE(bad.error.empty());

  write_file_atomic(dir / "ok.c", corpus_text("increment.c"));
  auto empty_stack = run_program(dir / "ok.c", quick(), [](const std::filesystem::path&) { return Stack{}; });
  CHECK(empty_stack.outcome == RunOutcome::failed);
}

TEST_CASE("elapsed wall clock is a timeout") {
  TempDir dir;
  write_file_atomic(dir / "slow.c", corpus_text("increment.c"));
  auto t0 = std::chrono::steady_clock::now();
  auto rep = run_program(dir / "slow.c", quick(), stack_for);
  CHECK(rep.outcome == RunOutcome::timeout);
  CHECK_FALSE(rep.verdict);
  CHECK(std::chrono::steady_clock::now() - t0 < 5s);
}

TEST_CASE("empty suite") {
  TempDir dir;
  write_file_atomic(dir / "notes.txt", "x");
  CHECK(suite_programs(dir.path()).empty());
  CHECK_THROWS_AS(run_suite(dir.path(), quick(), 2, stack_for), EmptySuite);
}

TEST_CASE("suite totals, histogram and worker independence") {
  TempDir dir;
  for (auto stem : {"ok", "ok2", "relax", "sysonly", "broken", "slow"})
    write_file_atomic(dir / (std::string(stem) + ".c"), corpus_text("increment.c"));

  auto serial = run_suite(dir.path(), quick(), 1, stack_for);
  CHECK(serial.per_program.size() == 6);
  CHECK(serial.per_program.at("ok.c").outcome == RunOutcome::converged);
  CHECK(serial.per_program.at("relax.c").outcome == RunOutcome::converged);
  CHECK(serial.per_program.at("relax.c").iterations == 1);
  CHECK(serial.per_program.at("sysonly.c").outcome == RunOutcome::system_only);
  CHECK(serial.per_program.at("broken.c").outcome == RunOutcome::failed);
  CHECK(serial.per_program.at("slow.c").outcome == RunOutcome::timeout);
  // ok2 has no dedicated behaviour and fails like broken
  CHECK(serial.totals.at(RunOutcome::converged) == 2);
  CHECK(serial.totals.at(RunOutcome::system_only) == 1);
  CHECK(serial.totals.at(RunOutcome::failed) == 2);
  CHECK(serial.totals.at(RunOutcome::timeout) == 1);
  CHECK(serial.iteration_histogram == std::map<std::size_t, std::size_t>{{0, 1}, {1, 1}});
  CHECK_FALSE(serial.all_converged());

  auto parallel = run_suite(dir.path(), quick(), 3, stack_for);
  CHECK(to_json_value(serial, false).dump() == to_json_value(parallel, false).dump());

  auto j = to_json_value(serial, true);
  CHECK(j.at("program_count") == 6);
  CHECK(j.at("totals").at("timeout") == 1);
  CHECK(j.contains("wall_time_s"));
  CHECK_FALSE(to_json_value(serial, false).contains("wall_time_s"));
  CHECK(j.at("programs").at("relax.c").at("verdict").at("stage") == "cegar");

  auto table = summary_table(serial);
  CHECK(has(table, "relax.c"));
  CHECK(has(table, "system_only"));
}

TEST_CASE("run report json carries the log on request") {
  TempDir dir;
  write_file_atomic(dir / "ok.c", corpus_text("increment.c"));
  auto rep = run_program(dir / "ok.c", quick(), stack_for);
  CHECK(rep.outcome == RunOutcome::converged);
  CHECK_FALSE(to_json_value(rep).contains("log"));
  CHECK(to_json_value(rep, false, true).at("log").is_array());
  CHECK_FALSE(to_json_value(rep, false).contains("wall_time_s"));
}
