#pragma once

// Chat-completion clients: scripted (tests), replay from a transcript store
// (optionally recording through an upstream client), and a live
// OpenAI-compatible HTTP client.

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "compver/prompts.hpp"

namespace compver {

struct ChatRequest {
  std::string prompt;
  Intent intent = Intent::initial;
  std::string function;
};

struct ChatReply {
  std::string text;
  std::string backend_id;
};

/// No reply obtainable (network failure, no replay hit, no script rule).
class ClientUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual ChatReply complete(const ChatRequest& req) = 0;
  virtual std::string id() const = 0;
};

/// Replies chosen by (intent, function). Each rule walks its reply list and
/// then keeps repeating the last entry. A rule with no intent or function
/// matches any. Thread-safe.
class ScriptedLlmClient final : public LlmClient {
 public:
  struct Rule {
    std::optional<Intent> intent;
    std::optional<std::string> function;
    std::vector<std::string> replies;
  };
  using Responder = std::function<std::optional<std::string>(const ChatRequest&)>;

  ScriptedLlmClient() = default;
  explicit ScriptedLlmClient(std::vector<Rule> rules);
  explicit ScriptedLlmClient(Responder responder);

  /// `{"rules": [{"intent": "relax", "function": "f", "replies": [...]}, ...]}`;
  /// a rule may use `"reply": "..."` instead of a list.
  static ScriptedLlmClient from_json(const nlohmann::json& j);

  void add_rule(Rule r);
  ChatReply complete(const ChatRequest& req) override;
  std::string id() const override { return "scripted"; }
  std::size_t calls() const;

 private:
  std::vector<Rule> rules_;
  std::vector<std::size_t> cursors_;
  Responder responder_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
};

struct LlmTranscript {
  std::string request_digest;
  std::string prompt;
  std::string reply;
  std::string backend_id;
  std::string timestamp;
};

void to_json(nlohmann::json& j, const LlmTranscript& t);
void from_json(const nlohmann::json& j, LlmTranscript& t);

std::string prompt_digest(std::string_view prompt);

/// Directory of `<digest>.json` transcripts. Writes go through a temporary
/// file and rename, so concurrent writers never expose partial files.
class TranscriptStore {
 public:
  explicit TranscriptStore(std::filesystem::path dir);

  std::optional<LlmTranscript> find(const std::string& digest) const;
  void put(const LlmTranscript& t) const;
  std::size_t size() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Answers from the store. On a miss, forwards to `upstream` (when given)
/// and records the exchange; otherwise throws ClientUnavailable.
class ReplayLlmClient final : public LlmClient {
 public:
  explicit ReplayLlmClient(std::shared_ptr<TranscriptStore> store, std::shared_ptr<LlmClient> upstream = nullptr);

  ChatReply complete(const ChatRequest& req) override;
  std::string id() const override;

 private:
  std::shared_ptr<TranscriptStore> store_;
  std::shared_ptr<LlmClient> upstream_;
};

struct LiveClientConfig {
  std::string endpoint;   // base URL, e.g. https://host/v1
  std::string model;
  std::string api_key;
  double temperature = 0.0;
  std::chrono::seconds timeout{120};

  /// From COMPVER_LLM_ENDPOINT, COMPVER_LLM_MODEL, COMPVER_LLM_API_KEY.
  /// Throws ClientUnavailable when endpoint or model is unset.
  static LiveClientConfig from_env();
};

/// OpenAI-compatible `POST <endpoint>/chat/completions`.
class LiveLlmClient final : public LlmClient {
 public:
  explicit LiveLlmClient(LiveClientConfig cfg);

  ChatReply complete(const ChatRequest& req) override;
  std::string id() const override { return "live:" + cfg_.model; }

 private:
  LiveClientConfig cfg_;
};

}  // namespace compver
