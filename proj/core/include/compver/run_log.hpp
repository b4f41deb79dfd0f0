#pragma once

// Append-only structured event stream for one pipeline run. Events carry no
// timings, so replayed runs produce identical logs.

#include <cstddef>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace compver {

class RunLog {
 public:
  RunLog() = default;
  RunLog(const RunLog& o);
  RunLog& operator=(const RunLog& o);

  void event(std::string_view kind, nlohmann::json fields = nlohmann::json::object());
  /// Appends all events of `other` in order.
  void append(const RunLog& other);

  std::vector<nlohmann::json> events() const;
  std::vector<nlohmann::json> events_of(std::string_view kind) const;
  std::size_t count(std::string_view kind) const;
  nlohmann::json to_json() const;

 private:
  mutable std::mutex mu_;
  std::vector<nlohmann::json> events_;
};

}  // namespace compver
