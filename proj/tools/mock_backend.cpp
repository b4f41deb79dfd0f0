// Stand-in for the model checker. Answers each check from a fixture directory
// keyed by the digest of the check mode and the submitted source.
//
//   compver-mock-backend --fixtures DIR [--enforce-contract F] [...] FILE
//
// Exit status 6 when no fixture matches.

#include <chrono>
#include <cstdlib>
#include <optional>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "compver/verifier.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    std::cerr << "usage: compver-mock-backend --fixtures DIR [--enforce-contract F] FILE\n";
    return 2;
  }
  fs::path fixtures;
  if (const char* env = std::getenv("COMPVER_MOCK_FIXTURES")) fixtures = env;
  std::string function;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--fixtures" && i + 2 < args.size()) fixtures = args[++i];
    else if (a.rfind("--fixtures=", 0) == 0) fixtures = a.substr(11);
    else if (a == "--enforce-contract" && i + 2 < args.size()) function = args[++i];
  }
  if (fixtures.empty()) {
    std::cerr << "mock: no fixture directory\n";
    return 2;
  }

  std::string text;
  try {
    text = compver::read_file(args.back());
  } catch (const std::exception& e) {
    std::cerr << "mock: " << e.what() << "\n";
    return 2;
  }
  const auto mode = function.empty() ? compver::CheckMode::system : compver::CheckMode::function;
  const auto key = compver::fixture_key(mode, function, text);

  std::optional<compver::Fixture> hit;
  std::error_code ec;
  if (fs::exists(fixtures / (key + ".out"), ec)) hit = compver::parse_fixture(compver::read_file(fixtures / (key + ".out")));
  if (!hit || hit->digest != key) {
    hit.reset();
    for (const auto& e : fs::directory_iterator(fixtures, ec)) {
      if (!e.is_regular_file()) continue;
      auto f = compver::parse_fixture(compver::read_file(e.path()));
      if (f && f->digest == key) {
        hit = std::move(f);
        break;
      }
    }
  }
  if (!hit) {
    std::cout << "mock: no fixture for " << key << "\n";
    return 6;
  }
  if (hit->sleep_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(hit->sleep_ms));
  std::cout << hit->output << std::flush;
  return hit->exit_code;
}
