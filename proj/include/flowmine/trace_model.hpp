#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flowmine/error.hpp"

namespace flowmine {

using MessageId = std::uint32_t;

enum class MessageKind { Request, Response };

/// One communication event: `src:dest:cmd:type`.
struct Message {
  MessageId id = 0;
  std::string src;
  std::string dest;
  std::string cmd;
  MessageKind kind = MessageKind::Request;

  /// `src:dest:cmd:req|resp`
  std::string quadruple() const;

  bool operator==(const Message&) const = default;
};

/// Structural causality: `cause` can trigger `effect` when the component
/// receiving `cause` is the one emitting `effect`.
inline bool causal(const Message& cause, const Message& effect) {
  return cause.dest == effect.src;
}

/// Vocabulary of messages plus the user-designated initial and terminal sets.
class MessageDictionary {
 public:
  MessageDictionary() = default;

  /// Throws Duplicate on a repeated id or quadruple, Parse on a bad token.
  void add(Message message);
  void mark_initial(MessageId id);
  void mark_terminal(MessageId id);

  bool contains(MessageId id) const { return messages_.count(id) != 0; }
  const Message& at(MessageId id) const;
  const std::map<MessageId, Message>& messages() const { return messages_; }
  const std::set<MessageId>& initial() const { return initial_; }
  const std::set<MessageId>& terminal() const { return terminal_; }
  bool is_initial(MessageId id) const { return initial_.count(id) != 0; }
  bool is_terminal(MessageId id) const { return terminal_.count(id) != 0; }
  std::size_t size() const { return messages_.size(); }
  bool empty() const { return messages_.empty(); }

  bool causal(MessageId cause, MessageId effect) const {
    return flowmine::causal(at(cause), at(effect));
  }

  /// Checks the set invariants (references declared, initial and terminal
  /// disjoint). Throws Reference or InvalidDictionary.
  void validate() const;

  bool operator==(const MessageDictionary&) const = default;

 private:
  std::map<MessageId, Message> messages_;
  std::set<MessageId> initial_;
  std::set<MessageId> terminal_;
};

struct Trace {
  std::vector<MessageId> events;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  bool operator==(const Trace&) const = default;
};

struct TraceSet {
  std::vector<Trace> traces;

  std::size_t size() const { return traces.size(); }
  bool empty() const { return traces.empty(); }
  std::size_t total_messages() const;
  bool operator==(const TraceSet&) const = default;
};

/// Token charset for quadruple fields.
bool is_valid_token(std::string_view token);

std::optional<MessageKind> parse_kind(std::string_view token);
const char* to_string(MessageKind kind);

/// Parses `<id> (<src>:<dest>:<cmd>:<req|resp>)`; `line_no` only decorates
/// the error.
Message parse_message_line(std::string_view line, std::size_t line_no = 0);

/// Message-definition file:
///   `<id> (<src>:<dest>:<cmd>:<req|resp>)`
///   `initial = {<id>,...}` / `terminal = {<id>,...}`
///   `#` comments
MessageDictionary parse_message_definitions(std::istream& in);
MessageDictionary parse_message_definitions(std::string_view text);

/// One trace per line, ids separated by spaces. Every id must be declared in
/// `dict`.
TraceSet parse_traces(std::istream& in, const MessageDictionary& dict);
TraceSet parse_traces(std::string_view text, const MessageDictionary& dict);

void write_message_definitions(std::ostream& out, const MessageDictionary& dict);
void write_traces(std::ostream& out, const TraceSet& traces);

std::string format_sequence(const std::vector<MessageId>& ids,
                            std::string_view separator = " ");

}  // namespace flowmine
