#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flowmine {

enum class ErrorKind {
  Parse,            // malformed line
  Duplicate,        // repeated id or quadruple
  Reference,        // id used but never declared
  EmptyDictionary,  // definition file declares no messages
  InvalidDictionary,
  EmptyModel,       // nothing to mine / no paths
  OverPruned,       // pruning disconnected every root from every terminal
  InvalidArgument,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the toolkit. Parse-related errors carry a
/// 1-based line (and column, when meaningful); zero means "not applicable".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::size_t line = 0,
        std::size_t column = 0);

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace flowmine
