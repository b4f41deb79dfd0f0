#include "compver/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <thread>

namespace compver {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr RunOutcome kOutcomes[] = {RunOutcome::converged, RunOutcome::system_only, RunOutcome::failed,
                                    RunOutcome::timeout};

}  // namespace

std::string_view to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::converged: return "converged";
    case RunOutcome::system_only: return "system_only";
    case RunOutcome::failed: return "failed";
    case RunOutcome::timeout: return "timeout";
  }
  return "?";
}

HarnessConfig HarnessConfig::verifythis_profile() {
  HarnessConfig c;
  c.pipeline.timeout_s = kVerifyThisTimeoutS;
  return c;
}

RunOutcome classify_outcome(const Verdict& v) {
  if (v.outcome == Outcome::verified) return RunOutcome::converged;
  const bool system_ok = v.system_status == VerificationStatus::pass;
  const bool any_function_failing = std::any_of(v.per_function_status.begin(), v.per_function_status.end(),
                                                [](const auto& kv) { return kv.second != VerificationStatus::pass; });
  return system_ok && any_function_failing ? RunOutcome::system_only : RunOutcome::failed;
}

RunReport run_program(const std::filesystem::path& path, const HarnessConfig& cfg, const StackFactory& stacks) {
  RunReport rep;
  rep.path = path.string();
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.pipeline.timeout_s));
  try {
    auto model = parse_program(read_file(path), cfg.weights);
    auto stack = stacks(path);
    if (!stack.client || !stack.verifier) throw std::invalid_argument("incomplete client/verifier stack");
    auto templates = stack.templates ? stack.templates : std::make_shared<const PromptTemplates>(PromptTemplates::builtin());
    auto result = run_pipeline(model, cfg.pipeline, *stack.client, *stack.verifier, *templates, deadline);
    rep.outcome = classify_outcome(result.verdict);
    rep.iterations = result.verdict.iterations_used;
    rep.stage = result.verdict.stage.label();
    rep.stripped_assigns = result.verdict.stripped_assigns;
    rep.verdict = std::move(result.verdict);
    rep.log = std::move(result.log);
  } catch (const DeadlineExceeded& e) {
    rep.outcome = RunOutcome::timeout;
    rep.error = e.what();
  } catch (const std::exception& e) {
    rep.outcome = RunOutcome::failed;
    rep.error = e.what();
  }
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

bool SuiteReport::all_converged() const {
  return std::all_of(per_program.begin(), per_program.end(),
                     [](const auto& kv) { return kv.second.outcome == RunOutcome::converged; });
}

std::vector<std::filesystem::path> suite_programs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".c") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

SuiteReport run_suite(const std::filesystem::path& dir, const HarnessConfig& cfg, std::size_t workers,
                      const StackFactory& stacks) {
  const auto programs = suite_programs(dir);
  if (programs.empty()) throw EmptySuite("no .c files in " + dir.string());
  const auto t0 = Clock::now();

  SuiteReport suite;
  for (auto o : kOutcomes) suite.totals[o] = 0;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < programs.size();) {
      auto rep = run_program(programs[i], cfg, stacks);
      std::lock_guard lock(mu);
      ++suite.totals[rep.outcome];
      if (rep.outcome == RunOutcome::converged) ++suite.iteration_histogram[rep.iterations];
      suite.per_program.emplace(programs[i].filename().string(), std::move(rep));
    }
  };
  const std::size_t n = std::clamp<std::size_t>(workers, 1, programs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  suite.wall_time_s = seconds_since(t0);
  return suite;
}

nlohmann::json to_json_value(const RunReport& r, bool with_timing, bool with_log) {
  nlohmann::json j{{"path", r.path},
                   {"outcome", to_string(r.outcome)},
                   {"verdict", r.verdict ? to_json_value(*r.verdict) : nlohmann::json()},
                   {"iterations", r.iterations},
                   {"stage", r.stage},
                   {"stripped_assigns", r.stripped_assigns},
                   {"error", r.error}};
  if (with_timing) j["wall_time_s"] = r.wall_time_s;
  if (with_log) j["log"] = r.log.to_json();
  return j;
}

nlohmann::json to_json_value(const SuiteReport& s, bool with_timing) {
  nlohmann::json programs = nlohmann::json::object();
  for (const auto& [name, rep] : s.per_program) {
    auto j = to_json_value(rep, with_timing);
    j.erase("path");
    programs[name] = std::move(j);
  }
  nlohmann::json totals = nlohmann::json::object();
  for (const auto& [o, n] : s.totals) totals[std::string(to_string(o))] = n;
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [k, n] : s.iteration_histogram) hist[std::to_string(k)] = n;
  nlohmann::json j{{"programs", programs},
                   {"totals", totals},
                   {"iteration_histogram", hist},
                   {"program_count", s.per_program.size()}};
  if (with_timing) j["wall_time_s"] = s.wall_time_s;
  return j;
}

std::string summary_table(const SuiteReport& s) {
  std::size_t width = 7;
  for (const auto& [name, rep] : s.per_program) width = std::max(width, name.size());
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s  %-11s  %5s  %-26s  %8s\n", static_cast<int>(width), "program", "outcome",
                "iters", "stage", "time_s");
  out += buf;
  for (const auto& [name, rep] : s.per_program) {
    std::snprintf(buf, sizeof buf, "%-*s  %-11s  %5zu  %-26s  %8.2f\n", static_cast<int>(width), name.c_str(),
                  std::string(to_string(rep.outcome)).c_str(), rep.iterations, rep.stage.c_str(), rep.wall_time_s);
    out += buf;
  }
  out += "\ntotals:";
  for (const auto& [o, n] : s.totals) out += " " + std::string(to_string(o)) + "=" + std::to_string(n);
  out += "\nconverged by iteration:";
  if (s.iteration_histogram.empty()) out += " (none)";
  for (const auto& [k, n] : s.iteration_histogram) out += " " + std::to_string(k) + ":" + std::to_string(n);
  std::snprintf(buf, sizeof buf, "\nwall time: %.2f s\n", s.wall_time_s);
  out += buf;
  return out;
}

}  // namespace compver
