#include "flowmine/error.hpp"

#include <sstream>

namespace flowmine {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Duplicate: return "duplication error";
    case ErrorKind::Reference: return "reference error";
    case ErrorKind::EmptyDictionary: return "empty dictionary";
    case ErrorKind::InvalidDictionary: return "invalid dictionary";
    case ErrorKind::EmptyModel: return "empty model";
    case ErrorKind::OverPruned: return "over-pruned graph";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message,
                     std::size_t line, std::size_t column) {
  std::ostringstream os;
  os << to_string(kind);
  if (line != 0) {
    os << " at line " << line;
    if (column != 0) os << ", column " << column;
  }
  os << ": " << message;
  return os.str();
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::size_t line,
             std::size_t column)
    : std::runtime_error(decorate(kind, message, line, column)),
      kind_(kind),
      line_(line),
      column_(column) {}

}  // namespace flowmine
