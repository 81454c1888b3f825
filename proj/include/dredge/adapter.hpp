#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <sys/types.h>
#include <vector>

#include "dredge/model.hpp"
#include "dredge/token.hpp"

namespace dredge {

/// Bridges any external code model into the engine. The child process
/// speaks line-delimited JSON over stdio: one request object
///   {"id":..., "language":..., "tokens":[...], "code":...}
/// per line, answered by one {"label":..., "score":...} line, in order.
///
/// One request is in flight at a time. A dead child is respawned on the
/// next request, so an adapter crash aborts only the sample that hit it.
class ExternalModel final : public Model {
 public:
  ExternalModel(std::vector<std::string> command,
                std::chrono::milliseconds timeout);
  ~ExternalModel() override;

  ExternalModel(const ExternalModel&) = delete;
  ExternalModel& operator=(const ExternalModel&) = delete;

  Prediction predict(const Program& program) override;
  std::string_view kind() const override { return "external"; }

  std::uint64_t requests_sent() const { return requests_sent_; }

 private:
  void spawn();
  void shutdown();
  bool alive() const { return pid_ > 0; }
  std::string read_line();

  std::vector<std::string> command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
  std::uint64_t requests_sent_ = 0;
  std::uint64_t next_request_id_ = 0;
};

std::unique_ptr<Model> spawn_external(std::vector<std::string> command,
                                      std::chrono::milliseconds timeout);

/// Splits an --adapter-cmd string into argv entries; single and double
/// quotes group words, backslash escapes the next character.
std::vector<std::string> split_command_line(std::string_view command_line);

}  // namespace dredge
