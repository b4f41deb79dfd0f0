#include "compver/llm_client.hpp"

#include <chrono>
#include <ctime>

#include "compver/digest.hpp"
#include "compver/verifier.hpp"

namespace compver {

namespace fs = std::filesystem;

ScriptedLlmClient::ScriptedLlmClient(std::vector<Rule> rules) : rules_(std::move(rules)), cursors_(rules_.size(), 0) {}

ScriptedLlmClient::ScriptedLlmClient(Responder responder) : responder_(std::move(responder)) {}

ScriptedLlmClient ScriptedLlmClient::from_json(const nlohmann::json& j) {
  std::vector<Rule> rules;
  for (const auto& r : j.at("rules")) {
    Rule rule;
    if (r.contains("intent")) {
      auto i = intent_from_string(r.at("intent").get<std::string>());
      if (!i) throw std::invalid_argument("unknown intent " + r.at("intent").dump());
      rule.intent = i;
    }
    if (r.contains("function")) rule.function = r.at("function").get<std::string>();
    if (r.contains("replies")) rule.replies = r.at("replies").get<std::vector<std::string>>();
    else rule.replies.push_back(r.at("reply").get<std::string>());
    if (rule.replies.empty()) throw std::invalid_argument("script rule without replies");
    rules.push_back(std::move(rule));
  }
  return ScriptedLlmClient(std::move(rules));
}

void ScriptedLlmClient::add_rule(Rule r) {
  std::lock_guard lock(mu_);
  rules_.push_back(std::move(r));
  cursors_.push_back(0);
}

std::size_t ScriptedLlmClient::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

ChatReply ScriptedLlmClient::complete(const ChatRequest& req) {
  std::lock_guard lock(mu_);
  ++calls_;
  if (responder_) {
    if (auto r = responder_(req)) return {*r, id()};
    throw ClientUnavailable("script has no reply for " + req.function);
  }
  for (std::size_t k = 0; k < rules_.size(); ++k) {
    const auto& rule = rules_[k];
    if (rule.intent && *rule.intent != req.intent) continue;
    if (rule.function && *rule.function != req.function) continue;
    if (rule.replies.empty()) continue;
    auto& cur = cursors_[k];
    const auto& reply = rule.replies[std::min(cur, rule.replies.size() - 1)];
    ++cur;
    return {reply, id()};
  }
  throw ClientUnavailable("script has no rule for " + std::string(to_string(req.intent)) + " " + req.function);
}

void to_json(nlohmann::json& j, const LlmTranscript& t) {
  j = nlohmann::json{{"request_digest", t.request_digest},
                     {"prompt", t.prompt},
                     {"reply", t.reply},
                     {"backend_id", t.backend_id},
                     {"timestamp", t.timestamp}};
}

void from_json(const nlohmann::json& j, LlmTranscript& t) {
  t.request_digest = j.at("request_digest").get<std::string>();
  t.prompt = j.at("prompt").get<std::string>();
  t.reply = j.at("reply").get<std::string>();
  t.backend_id = j.value("backend_id", "");
  t.timestamp = j.value("timestamp", "");
}

std::string prompt_digest(std::string_view prompt) { return sha256_hex(prompt); }

TranscriptStore::TranscriptStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::optional<LlmTranscript> TranscriptStore::find(const std::string& digest) const {
  auto file = dir_ / (digest + ".json");
  std::error_code ec;
  if (!fs::exists(file, ec)) return std::nullopt;
  return nlohmann::json::parse(read_file(file)).get<LlmTranscript>();
}

void TranscriptStore::put(const LlmTranscript& t) const {
  write_file_atomic(dir_ / (t.request_digest + ".json"), nlohmann::json(t).dump(2) + "\n");
}

std::size_t TranscriptStore::size() const {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir_))
    if (e.path().extension() == ".json") ++n;
  return n;
}

ReplayLlmClient::ReplayLlmClient(std::shared_ptr<TranscriptStore> store, std::shared_ptr<LlmClient> upstream)
    : store_(std::move(store)), upstream_(std::move(upstream)) {}

std::string ReplayLlmClient::id() const { return upstream_ ? "record:" + upstream_->id() : "replay"; }

ChatReply ReplayLlmClient::complete(const ChatRequest& req) {
  auto digest = prompt_digest(req.prompt);
  if (auto t = store_->find(digest)) return {t->reply, t->backend_id};
  if (!upstream_) throw ClientUnavailable("no transcript for prompt " + digest);
  auto reply = upstream_->complete(req);
  char stamp[32];
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  store_->put({digest, req.prompt, reply.text, reply.backend_id, stamp});
  return reply;
}

}  // namespace compver
