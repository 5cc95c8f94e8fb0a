#pragma once

#include <ostream>
#include <set>
#include <vector>

#include "flowmine/causality.hpp"
#include "flowmine/trace_model.hpp"

namespace flowmine {

/// Cause/effect pairs whose effect had exactly one structural cause candidate
/// somewhere in the traces.
struct EssentialSet {
  std::set<Edge> pairs;

  bool contains(MessageId cause, MessageId effect) const {
    return pairs.count(Edge{cause, effect}) != 0;
  }
  std::size_t size() const { return pairs.size(); }
  bool operator==(const EssentialSet&) const = default;
};

/// An initial-to-terminal chain in which every link is essential.
struct EssentialFlow {
  std::vector<MessageId> sequence;

  auto operator<=>(const EssentialFlow&) const = default;
};

/// Scans each trace left to right. For every non-initial message it collects
/// the distinct (cause value, effect value) pairs offered by earlier,
/// still-unconsumed, structurally causal instances. A single distinct pair is
/// essential. Whenever at least one candidate exists, the nearest candidate
/// instance is consumed so it cannot explain a later message.
EssentialSet extract_essential(const TraceSet& traces, const MessageDictionary& dict);

/// Per-trace worker of extract_essential; exposed for tests.
EssentialSet extract_essential(const Trace& trace, const MessageDictionary& dict);

/// All simple chains initial -> ... -> terminal over essential links, at most
/// `max_len` messages, sorted by (length desc, sequence asc).
std::vector<EssentialFlow> essential_flows(const EssentialSet& essential,
                                           const MessageDictionary& dict, std::size_t max_len);

struct EmfRemoval {
  Trace reduced;
  std::size_t removed_count = 0;
  /// Index into the flow list for every deleted block, in deletion order.
  std::vector<std::size_t> removed_flows;
};

/// Repeatedly deletes a contiguous occurrence of some flow, choosing the
/// longest matching flow first, then the leftmost occurrence, then the
/// smallest first id. Deletions can create new contiguous occurrences; the
/// loop runs until none remain.
EmfRemoval remove_emfs(const Trace& trace, const std::vector<EssentialFlow>& flows);

/// `cause -> effect` lines, ascending.
void write_essential(std::ostream& out, const EssentialSet& essential);

}  // namespace flowmine
