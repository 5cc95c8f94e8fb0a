#include "flowmine/trace_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <utility>

namespace flowmine {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

std::optional<MessageId> parse_id(std::string_view token) {
  if (token.empty()) return std::nullopt;
  MessageId value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

// `initial = {1,3}` -> ("initial", {1,3})
void parse_directive(std::string_view line, std::size_t line_no,
                     std::vector<std::pair<std::size_t, MessageId>>& initial,
                     std::vector<std::pair<std::size_t, MessageId>>& terminal) {
  auto eq = line.find('=');
  auto name = trim(line.substr(0, eq));
  auto rhs = trim(line.substr(eq + 1));
  if (rhs.size() < 2 || rhs.front() != '{' || rhs.back() != '}') {
    throw Error(ErrorKind::Parse, "expected `{id,...}` after `=`", line_no);
  }
  auto body = trim(rhs.substr(1, rhs.size() - 2));
  std::vector<std::pair<std::size_t, MessageId>>* target = nullptr;
  if (name == "initial") {
    target = &initial;
  } else if (name == "terminal") {
    target = &terminal;
  } else {
    throw Error(ErrorKind::Parse, "unknown directive `" + std::string(name) + "`", line_no);
  }
  if (body.empty()) return;
  for (auto part : split(body, ',')) {
    auto id = parse_id(trim(part));
    if (!id) {
      throw Error(ErrorKind::Parse, "bad message id `" + std::string(trim(part)) + "`", line_no);
    }
    target->emplace_back(line_no, *id);
  }
}

}  // namespace

Message parse_message_line(std::string_view line, std::size_t line_no) {
  line = trim(line);
  auto open = line.find('(');
  if (line.empty() || open == std::string_view::npos || line.back() != ')') {
    throw Error(ErrorKind::Parse, "expected `<id> (<src>:<dest>:<cmd>:<type>)`", line_no);
  }
  auto id = parse_id(trim(line.substr(0, open)));
  if (!id) {
    throw Error(ErrorKind::Parse, "bad message id `" + std::string(trim(line.substr(0, open))) + "`",
                line_no);
  }
  auto fields = split(line.substr(open + 1, line.size() - open - 2), ':');
  if (fields.size() != 4) {
    throw Error(ErrorKind::Parse, "quadruple needs exactly four `:`-separated fields", line_no);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (!is_valid_token(fields[i])) {
      throw Error(ErrorKind::Parse, "bad token `" + std::string(fields[i]) + "`", line_no);
    }
  }
  auto kind = parse_kind(fields[3]);
  if (!kind) {
    throw Error(ErrorKind::Parse,
                "message type must be `req` or `resp`, got `" + std::string(fields[3]) + "`",
                line_no);
  }
  return Message{*id, std::string(fields[0]), std::string(fields[1]), std::string(fields[2]),
                 *kind};
}

std::string Message::quadruple() const {
  return src + ":" + dest + ":" + cmd + ":" + to_string(kind);
}

bool is_valid_token(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::optional<MessageKind> parse_kind(std::string_view token) {
  if (token == "req") return MessageKind::Request;
  if (token == "resp") return MessageKind::Response;
  return std::nullopt;
}

const char* to_string(MessageKind kind) {
  return kind == MessageKind::Request ? "req" : "resp";
}

void MessageDictionary::add(Message message) {
  for (const auto* field : {&message.src, &message.dest, &message.cmd}) {
    if (!is_valid_token(*field)) {
      throw Error(ErrorKind::Parse, "bad token `" + *field + "`");
    }
  }
  if (contains(message.id)) {
    throw Error(ErrorKind::Duplicate, "message id " + std::to_string(message.id) + " declared twice");
  }
  for (const auto& [id, existing] : messages_) {
    if (existing.src == message.src && existing.dest == message.dest &&
        existing.cmd == message.cmd && existing.kind == message.kind) {
      throw Error(ErrorKind::Duplicate, "messages " + std::to_string(id) + " and " +
                                            std::to_string(message.id) + " share quadruple " +
                                            message.quadruple());
    }
  }
  auto id = message.id;
  messages_.emplace(id, std::move(message));
}

void MessageDictionary::mark_initial(MessageId id) { initial_.insert(id); }
void MessageDictionary::mark_terminal(MessageId id) { terminal_.insert(id); }

const Message& MessageDictionary::at(MessageId id) const {
  auto it = messages_.find(id);
  if (it == messages_.end()) {
    throw Error(ErrorKind::Reference, "message id " + std::to_string(id) + " is not declared");
  }
  return it->second;
}

void MessageDictionary::validate() const {
  for (const auto* set : {&initial_, &terminal_}) {
    for (auto id : *set) {
      if (!contains(id)) {
        throw Error(ErrorKind::Reference, std::string(set == &initial_ ? "initial" : "terminal") +
                                              " message " + std::to_string(id) +
                                              " is not declared");
      }
    }
  }
  for (auto id : initial_) {
    if (terminal_.count(id)) {
      throw Error(ErrorKind::InvalidDictionary,
                  "message " + std::to_string(id) + " is both initial and terminal");
    }
  }
}

std::size_t TraceSet::total_messages() const {
  std::size_t total = 0;
  for (const auto& t : traces) total += t.size();
  return total;
}

MessageDictionary parse_message_definitions(std::istream& in) {
  MessageDictionary dict;
  std::vector<std::pair<std::size_t, MessageId>> initial;
  std::vector<std::pair<std::size_t, MessageId>> terminal;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.find('=') != std::string_view::npos) {
      parse_directive(line, line_no, initial, terminal);
      continue;
    }
    auto message = parse_message_line(line, line_no);
    try {
      dict.add(std::move(message));
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), line_no);
    }
  }
  if (dict.empty()) {
    throw Error(ErrorKind::EmptyDictionary, "no message definitions found");
  }
  for (auto [line, id] : initial) {
    if (!dict.contains(id)) {
      throw Error(ErrorKind::Reference,
                  "initial message " + std::to_string(id) + " is not declared", line);
    }
    dict.mark_initial(id);
  }
  for (auto [line, id] : terminal) {
    if (!dict.contains(id)) {
      throw Error(ErrorKind::Reference,
                  "terminal message " + std::to_string(id) + " is not declared", line);
    }
    dict.mark_terminal(id);
  }
  dict.validate();
  return dict;
}

MessageDictionary parse_message_definitions(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_message_definitions(in);
}

TraceSet parse_traces(std::istream& in, const MessageDictionary& dict) {
  TraceSet set;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_comment(raw);
    Trace trace;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos >= line.size()) break;
      auto end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      auto token = line.substr(pos, end - pos);
      auto id = parse_id(token);
      if (!id) {
        throw Error(ErrorKind::Parse, "bad message id `" + std::string(token) + "`", line_no,
                    pos + 1);
      }
      if (!dict.contains(*id)) {
        throw Error(ErrorKind::Reference,
                    "message id " + std::to_string(*id) + " is not declared", line_no, pos + 1);
      }
      trace.events.push_back(*id);
      pos = end;
    }
    if (!trace.empty()) set.traces.push_back(std::move(trace));
  }
  return set;
}

TraceSet parse_traces(std::string_view text, const MessageDictionary& dict) {
  std::istringstream in{std::string(text)};
  return parse_traces(in, dict);
}

namespace {

void write_id_set(std::ostream& out, const char* name, const std::set<MessageId>& ids) {
  out << name << " = {";
  bool first = true;
  for (auto id : ids) {
    if (!first) out << ',';
    out << id;
    first = false;
  }
  out << "}\n";
}

}  // namespace

void write_message_definitions(std::ostream& out, const MessageDictionary& dict) {
  for (const auto& [id, message] : dict.messages()) {
    out << id << " (" << message.quadruple() << ")\n";
  }
  write_id_set(out, "initial", dict.initial());
  write_id_set(out, "terminal", dict.terminal());
}

void write_traces(std::ostream& out, const TraceSet& traces) {
  for (const auto& trace : traces.traces) {
    out << format_sequence(trace.events) << '\n';
  }
}

std::string format_sequence(const std::vector<MessageId>& ids, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += separator;
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace flowmine
