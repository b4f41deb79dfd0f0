#include <cstdlib>

#include <httplib.h>

#include "compver/llm_client.hpp"

namespace compver {

LiveClientConfig LiveClientConfig::from_env() {
  auto get = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  LiveClientConfig cfg;
  cfg.endpoint = get("COMPVER_LLM_ENDPOINT");
  cfg.model = get("COMPVER_LLM_MODEL");
  cfg.api_key = get("COMPVER_LLM_API_KEY");
  if (cfg.endpoint.empty() || cfg.model.empty())
    throw ClientUnavailable("COMPVER_LLM_ENDPOINT and COMPVER_LLM_MODEL must be set for the live client");
  return cfg;
}

LiveLlmClient::LiveLlmClient(LiveClientConfig cfg) : cfg_(std::move(cfg)) {}

ChatReply LiveLlmClient::complete(const ChatRequest& req) {
  // Split "scheme://host[:port]/base" into the client address and path prefix.
  auto scheme_end = cfg_.endpoint.find("://");
  auto path_start = cfg_.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string host = cfg_.endpoint.substr(0, path_start);
  std::string base = path_start == std::string::npos ? "" : cfg_.endpoint.substr(path_start);
  while (!base.empty() && base.back() == '/') base.pop_back();

  httplib::Client cli(host);
  auto secs = static_cast<time_t>(cfg_.timeout.count());
  cli.set_connection_timeout(secs, 0);
  cli.set_read_timeout(secs, 0);
  cli.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  nlohmann::json body{{"model", cfg_.model},
                      {"temperature", cfg_.temperature},
                      {"messages", {{{"role", "user"}, {"content", req.prompt}}}}};
  auto res = cli.Post(base + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) throw ClientUnavailable("LLM endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw ClientUnavailable("LLM endpoint returned HTTP " + std::to_string(res->status));
  try {
    auto j = nlohmann::json::parse(res->body);
    return {j.at("choices").at(0).at("message").at("content").get<std::string>(), id()};
  } catch (const nlohmann::json::exception& e) {
    throw ClientUnavailable(std::string("malformed LLM response: ") + e.what());
  }
}

}  // namespace compver
