#include <benchmark/benchmark.h>

#include <algorithm>
#include <filesystem>

#include "compver/delta_debug.hpp"
#include "compver/ice.hpp"
#include "compver/instrument.hpp"
#include "compver/pipeline.hpp"
#include "compver/program_model.hpp"
#include "compver/verifier.hpp"

using namespace compver;

namespace {

std::string corpus(const char* name) { return read_file(std::filesystem::path(COMPVER_CORPUS_DIR) / name); }

const std::string kTrace = [] {
  std::string out = "Counterexample:\n\n";
  for (int i = 1; i <= 200; ++i)
    out += "State " + std::to_string(i) + " file input.c line 5 column 3 function sum_to thread 0\n"
           "----------------------------------------------------\n  sum = " + std::to_string(i * 3) +
           "\n  i = " + std::to_string(i) + "\n\n";
  return out + "Violated property:\n  file input.c line 9 column 5 function main\n  assertion\n  s == 6\n\n"
               "VERIFICATION FAILED\n";
}();

}  // namespace

static void BM_ParseProgram(benchmark::State& state) {
  const auto src = corpus("nested_loops.c");
  for (auto _ : state) benchmark::DoNotOptimize(parse_program(src));
}
BENCHMARK(BM_ParseProgram);

static void BM_RenderAndStrip(benchmark::State& state) {
  auto m = parse_program(corpus("summation.c"));
  Contract c;
  c.function_name = "sum_to";
  c.preconditions = {"n >= 0"};
  c.postconditions = {"__ESBMC_return_value >= 0"};
  c.loop_invariants[0] = "sum == i * (i - 1) / 2";
  for (auto _ : state) {
    auto src = render_enforce(m, c);
    benchmark::DoNotOptimize(strip(src));
  }
}
BENCHMARK(BM_RenderAndStrip);

static void BM_ParseTrace(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_verifier_output(kTrace));
}
BENCHMARK(BM_ParseTrace);

static void BM_IceAdmit(benchmark::State& state) {
  const Classification semantic{ClassLevel::semantic_level, Category::semantic};
  for (auto _ : state) {
    IceDatabase db;
    for (int i = 0; i < state.range(0); ++i) {
      db.record_positive(make_example("f", {{"x", std::to_string(i)}}));
      db.admit(semantic, make_example("f", {{"x", std::to_string(-i)}}));
    }
    benchmark::DoNotOptimize(db.negatives().size());
  }
}
BENCHMARK(BM_IceAdmit)->Arg(64)->Arg(512);

static void BM_DeltaDebug(benchmark::State& state) {
  Contract c;
  c.function_name = "f";
  for (int i = 0; i < state.range(0); ++i) c.postconditions.push_back("c" + std::to_string(i));
  auto check = [](const Contract& k) {
    return std::find(k.postconditions.begin(), k.postconditions.end(), "c3") == k.postconditions.end();
  };
  for (auto _ : state) benchmark::DoNotOptimize(delta_debug(c, check));
}
BENCHMARK(BM_DeltaDebug)->Arg(8)->Arg(32);

static void BM_PipelineScripted(benchmark::State& state) {
  auto m = parse_program(corpus("increment.c"));
  for (auto _ : state) {
    ScriptedLlmClient client({{{}, {}, {"__ESBMC_ensures(__ESBMC_return_value > x);"}}});
    ScriptedVerifier v([](const CheckRequest&) -> ScriptedReply { return std::string("VERIFICATION SUCCESSFUL\n"); });
    benchmark::DoNotOptimize(run_pipeline(m, {}, client, v));
  }
}
BENCHMARK(BM_PipelineScripted);

BENCHMARK_MAIN();
