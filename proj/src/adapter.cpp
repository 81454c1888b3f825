#include "dredge/adapter.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include "dredge/errors.hpp"

#include <nlohmann/json.hpp>

namespace dredge {

namespace {

void write_all(int fd, std::string_view data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw AdapterError(std::string("write to adapter failed: ") +
                         std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

}  // namespace

ExternalModel::ExternalModel(std::vector<std::string> command,
                             std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  if (command_.empty()) {
    throw ConfigError("external adapter command is empty");
  }
  // SIGPIPE would kill us when the child dies mid-write; report it instead.
  ::signal(SIGPIPE, SIG_IGN);
  spawn();
}

ExternalModel::~ExternalModel() { shutdown(); }

void ExternalModel::spawn() {
  int to_child[2];
  int from_child[2];
  int exec_report[2];  // CLOEXEC self-pipe: carries errno if exec fails
  if (pipe(to_child) != 0 || pipe(from_child) != 0 ||
      pipe(exec_report) != 0) {
    throw ConfigError(std::string("pipe failed: ") + std::strerror(errno));
  }
  fcntl(exec_report[1], F_SETFD, FD_CLOEXEC);
  pid_t pid = fork();
  if (pid < 0) {
    throw ConfigError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    close(exec_report[0]);
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> argv;
    argv.reserve(command_.size() + 1);
    for (const std::string& arg : command_) {
      argv.push_back(const_cast<char*>(arg.c_str()));
    }
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    int err = errno;
    ssize_t ignored = ::write(exec_report[1], &err, sizeof(err));
    (void)ignored;
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  close(exec_report[1]);

  int exec_errno = 0;
  ssize_t n = ::read(exec_report[0], &exec_errno, sizeof(exec_errno));
  close(exec_report[0]);
  if (n > 0) {
    waitpid(pid, nullptr, 0);
    close(to_child[1]);
    close(from_child[0]);
    throw ConfigError("cannot launch adapter '" + command_[0] +
                      "': " + std::strerror(exec_errno));
  }

  pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
  read_buffer_.clear();
}

void ExternalModel::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == 0) {
      kill(pid_, SIGTERM);
      waitpid(pid_, &status, 0);
    }
  }
  pid_ = -1;
}

std::string ExternalModel::read_line() {
  auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    auto nl = read_buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      return line;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      shutdown();
      throw AdapterError("adapter timed out after " +
                         std::to_string(timeout_.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      shutdown();
      throw AdapterError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      shutdown();
      throw AdapterError(std::string("read from adapter failed: ") +
                         std::strerror(errno));
    }
    if (n == 0) {
      shutdown();
      throw AdapterError("adapter exited before answering");
    }
    read_buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Prediction ExternalModel::predict(const Program& program) {
  if (!alive()) {
    // The command was validated at construction; a respawn failure here
    // is an adapter runtime problem, not a configuration one.
    try {
      spawn();
    } catch (const ConfigError& e) {
      throw AdapterError(e.what());
    }
  }

  nlohmann::json request;
  request["id"] = program.source_id.empty()
                      ? "q" + std::to_string(next_request_id_)
                      : program.source_id;
  request["language"] = std::string(to_string(program.language));
  auto tokens = nlohmann::json::array();
  for (const Token& tok : program.tokens) tokens.push_back(tok.text);
  request["tokens"] = std::move(tokens);
  request["code"] = render(program);
  ++next_request_id_;

  std::string line = request.dump();
  line.push_back('\n');
  try {
    write_all(to_child_, line);
  } catch (const AdapterError&) {
    shutdown();
    throw;
  }
  ++requests_sent_;

  std::string response = read_line();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(response);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("adapter response is not valid JSON: " + response);
  }
  if (!doc.is_object() || !doc.contains("label") || !doc.contains("score") ||
      !doc.at("label").is_string() || !doc.at("score").is_number()) {
    throw ProtocolError("adapter response missing label/score: " + response);
  }
  Prediction prediction{doc.at("label").get<std::string>(),
                        doc.at("score").get<double>()};
  if (!std::isfinite(prediction.score) || prediction.score < 0.0 ||
      prediction.score > 1.0) {
    throw ProtocolError("adapter score " + std::to_string(prediction.score) +
                        " outside [0,1]");
  }
  if (prediction.label.empty()) {
    throw ProtocolError("adapter returned an empty label");
  }
  return prediction;
}

std::unique_ptr<Model> spawn_external(std::vector<std::string> command,
                                      std::chrono::milliseconds timeout) {
  return std::make_unique<ExternalModel>(std::move(command), timeout);
}

std::vector<std::string> split_command_line(std::string_view command_line) {
  std::vector<std::string> args;
  std::string current;
  bool have_current = false;
  char quote = '\0';
  for (std::size_t i = 0; i < command_line.size(); ++i) {
    char c = command_line[i];
    if (quote != '\0') {
      if (c == quote) {
        quote = '\0';
      } else if (c == '\\' && quote == '"' && i + 1 < command_line.size()) {
        current.push_back(command_line[++i]);
      } else {
        current.push_back(c);
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      have_current = true;
      continue;
    }
    if (c == '\\' && i + 1 < command_line.size()) {
      current.push_back(command_line[++i]);
      have_current = true;
      continue;
    }
    if (c == ' ' || c == '\t') {
      if (have_current || !current.empty()) {
        args.push_back(std::move(current));
        current.clear();
        have_current = false;
      }
      continue;
    }
    current.push_back(c);
    have_current = true;
  }
  if (have_current || !current.empty()) args.push_back(std::move(current));
  return args;
}

}  // namespace dredge
