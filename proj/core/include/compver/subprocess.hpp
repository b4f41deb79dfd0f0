#pragma once

// Child-process execution with merged stdout/stderr capture and a hard
// wall-clock limit. The child runs in its own process group, which is killed
// as a whole when the limit elapses.

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace compver {

struct ProcessResult {
  int exit_code = -1;        // -1 when killed or not started
  bool timed_out = false;
  bool spawn_failed = false;
  std::string output;        // stdout and stderr, interleaved
  double wall_time_s = 0.0;
};

ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds limit);

/// Resolves `name` against PATH (or checks it directly when it has a slash).
std::optional<std::filesystem::path> find_executable(const std::string& name);

}  // namespace compver
