#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dredge {

/// Bad configuration: unknown language, malformed model spec, missing paths.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Lexing failed; carries the source line of the offending construct.
struct LexError : std::runtime_error {
  LexError(const std::string& message, std::size_t line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
        line(line) {}
  std::size_t line;
};

/// The model returned something the engine refuses to accept
/// (score outside [0,1], empty label, malformed response line).
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An external adapter process died, timed out, or could not be spawned
/// mid-run. Fails the current sample only.
struct AdapterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Aggregation requested over zero samples.
struct EmptyCorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dredge
