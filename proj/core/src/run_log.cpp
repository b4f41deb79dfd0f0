#include "compver/run_log.hpp"

namespace compver {

RunLog::RunLog(const RunLog& o) : events_(o.events()) {}

RunLog& RunLog::operator=(const RunLog& o) {
  if (this != &o) {
    auto copy = o.events();
    std::lock_guard lock(mu_);
    events_ = std::move(copy);
  }
  return *this;
}

void RunLog::event(std::string_view kind, nlohmann::json fields) {
  nlohmann::json e{{"event", kind}};
  if (fields.is_object())
    for (auto& [k, v] : fields.items()) e[k] = std::move(v);
  std::lock_guard lock(mu_);
  e["seq"] = events_.size();
  events_.push_back(std::move(e));
}

void RunLog::append(const RunLog& other) {
  for (auto e : other.events()) {
    std::string kind = e.value("event", "");
    e.erase("event");
    e.erase("seq");
    event(kind, std::move(e));
  }
}

std::vector<nlohmann::json> RunLog::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::vector<nlohmann::json> RunLog::events_of(std::string_view kind) const {
  std::lock_guard lock(mu_);
  std::vector<nlohmann::json> out;
  for (const auto& e : events_)
    if (e.value("event", "") == kind) out.push_back(e);
  return out;
}

std::size_t RunLog::count(std::string_view kind) const { return events_of(kind).size(); }

nlohmann::json RunLog::to_json() const {
  std::lock_guard lock(mu_);
  return nlohmann::json(events_);
}

}  // namespace compver
