#include "compver/verifier.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>

#include "compver/c_lexer.hpp"
#include "compver/digest.hpp"
#include "compver/subprocess.hpp"

namespace compver {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

std::string fixture_key(CheckMode mode, std::string_view function, std::string_view text) {
  std::string head = mode == CheckMode::system ? "system\n" : "function " + std::string(function) + "\n";
  return sha256_hex(head + std::string(text));
}

std::string fixture_key(const CheckRequest& req) {
  return fixture_key(req.mode, req.function, req.source->text);
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

// True when a top-level definition or declaration of `f` carries `static`.
bool declared_static(std::string_view text, const std::string& f) {
  auto t = tokenize_code(text);
  int depth = 0;
  std::size_t stmt_begin = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].is("{")) ++depth;
    else if (t[i].is("}")) {
      --depth;
      if (depth == 0) stmt_begin = i + 1;
    } else if (depth == 0 && t[i].is(";")) {
      stmt_begin = i + 1;
    } else if (depth == 0 && t[i].is(f) && i + 1 < t.size() && t[i + 1].is("(")) {
      for (std::size_t k = stmt_begin; k < i; ++k)
        if (t[k].is("static")) return true;
    }
  }
  return false;
}

VerificationResult from_output(std::string raw, const VerifierConfig& cfg, const CheckRequest& req) {
  VerificationResult r;
  auto p = parse_verifier_output(raw, cfg);
  r.status = p.status;
  r.parsed = std::move(p.parsed);
  r.reason = std::move(p.reason);
  r.raw_output = std::move(raw);
  r.mode = req.mode;
  r.function = req.function;
  return r;
}

void check_deadline(const Deadline& d) {
  if (d && clock_type::now() >= *d) throw DeadlineExceeded("program deadline elapsed");
}

}  // namespace

VerificationResult Verifier::verify_system(const InstrumentedSource& src, Deadline deadline) {
  if (src.mode != RenderMode::replace) throw std::invalid_argument("system check needs a replace-mode source");
  check_deadline(deadline);
  CheckRequest req{CheckMode::system, "", &src, deadline};
  auto r = run(req);
  if (r.status == VerificationStatus::timeout) check_deadline(deadline);
  return r;
}

VerificationResult Verifier::verify_function(const InstrumentedSource& src, const std::string& f, Deadline deadline) {
  if (src.mode != RenderMode::enforce || src.target != f)
    throw std::invalid_argument("function check needs an enforce-mode source for " + f);
  check_deadline(deadline);
  if (declared_static(src.text, f)) {
    VerificationResult r;
    r.status = VerificationStatus::tool_error;
    r.mode = CheckMode::function;
    r.function = f;
    r.reason = reason::function_not_found;
    r.raw_output = "function " + f + " is static and cannot be located by name\n";
    return r;
  }
  CheckRequest req{CheckMode::function, f, &src, deadline};
  auto r = run(req);
  if (r.status == VerificationStatus::timeout) check_deadline(deadline);
  return r;
}

BackendVerifier::BackendVerifier(VerifierConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.timeout_s <= 0) throw std::invalid_argument("backend timeout must be positive");
  auto exe = find_executable(cfg_.backend_path);
  if (!exe) throw BackendNotFound("backend not found: " + cfg_.backend_path);
  exe_ = *exe;
}

std::vector<std::string> BackendVerifier::command_for(const CheckRequest& req) const {
  std::vector<std::string> argv{exe_.string()};
  if (req.mode == CheckMode::function) {
    argv.push_back(cfg_.enforce_mode_flag);
    argv.push_back(req.function);
  } else {
    for (const auto& f : req.source->replaced) {
      argv.push_back(cfg_.replace_mode_flag);
      argv.push_back(f);
    }
  }
  argv.insert(argv.end(), cfg_.extra_flags.begin(), cfg_.extra_flags.end());
  return argv;
}

VerificationResult BackendVerifier::run(const CheckRequest& req) {
  auto limit = std::chrono::milliseconds(static_cast<long long>(cfg_.timeout_s * 1000.0));
  if (req.deadline) {
    auto left = std::chrono::ceil<std::chrono::milliseconds>(*req.deadline - clock_type::now());
    limit = std::min(limit, std::max(left, std::chrono::milliseconds(1)));
  }

  std::string tmpl = (fs::temp_directory_path() / "compver-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("cannot create temporary directory");
  fs::path dir(tmpl);
  fs::path file = dir / "input.c";
  write_file_atomic(file, req.source->text);

  auto argv = command_for(req);
  argv.push_back(file.string());
  auto proc = run_process(argv, limit);
  std::error_code ec;
  fs::remove_all(dir, ec);

  if (proc.spawn_failed) throw BackendNotFound(proc.output);
  VerificationResult r;
  if (proc.timed_out) {
    r.status = VerificationStatus::timeout;
    r.raw_output = std::move(proc.output);
    r.mode = req.mode;
    r.function = req.function;
  } else {
    r = from_output(std::move(proc.output), cfg_, req);
  }
  r.wall_time_s = proc.wall_time_s;
  return r;
}

ScriptedVerifier::ScriptedVerifier(Script script, VerifierConfig cfg)
    : script_(std::move(script)), cfg_(std::move(cfg)) {}

std::size_t ScriptedVerifier::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

VerificationResult ScriptedVerifier::run(const CheckRequest& req) {
  {
    std::lock_guard lock(mu_);
    ++calls_;
  }
  auto reply = script_(req);
  if (reply.timed_out) {
    VerificationResult r;
    r.status = VerificationStatus::timeout;
    r.raw_output = std::move(reply.output);
    r.mode = req.mode;
    r.function = req.function;
    return r;
  }
  return from_output(std::move(reply.output), cfg_, req);
}

RecordingVerifier::RecordingVerifier(Verifier& inner, fs::path dir, long long timeout_sleep_ms)
    : inner_(inner), dir_(std::move(dir)), sleep_ms_(timeout_sleep_ms) {}

VerificationResult RecordingVerifier::run(const CheckRequest& req) {
  auto r = inner_.run(req);
  Fixture f;
  f.digest = fixture_key(req);
  f.output = r.raw_output;
  if (r.status == VerificationStatus::timeout) f.sleep_ms = sleep_ms_;
  write_file_atomic(dir_ / (f.digest + ".out"), render_fixture(f));
  return r;
}

}  // namespace compver
