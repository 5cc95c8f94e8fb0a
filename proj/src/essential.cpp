#include "flowmine/essential.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace flowmine {

EssentialSet extract_essential(const Trace& trace, const MessageDictionary& dict) {
  EssentialSet out;
  const auto& events = trace.events;
  std::vector<char> consumed(events.size(), 0);
  std::vector<const Message*> messages;
  messages.reserve(events.size());
  for (auto id : events) messages.push_back(&dict.at(id));

  for (std::size_t i = 1; i < events.size(); ++i) {
    if (dict.is_initial(events[i])) continue;
    std::set<MessageId> cause_values;
    std::size_t nearest = events.size();
    for (std::size_t j = 0; j < i; ++j) {
      if (consumed[j] || !causal(*messages[j], *messages[i])) continue;
      cause_values.insert(events[j]);
      nearest = j;
    }
    if (cause_values.empty()) continue;
    if (cause_values.size() == 1) out.pairs.insert(Edge{*cause_values.begin(), events[i]});
    consumed[nearest] = 1;
  }
  return out;
}

EssentialSet extract_essential(const TraceSet& traces, const MessageDictionary& dict) {
  EssentialSet out;
  for (const auto& trace : traces.traces) {
    auto part = extract_essential(trace, dict);
    out.pairs.insert(part.pairs.begin(), part.pairs.end());
  }
  return out;
}

std::vector<EssentialFlow> essential_flows(const EssentialSet& essential,
                                           const MessageDictionary& dict, std::size_t max_len) {
  std::map<MessageId, std::vector<MessageId>> next;
  for (const auto& e : essential.pairs) next[e.head].push_back(e.tail);

  std::vector<EssentialFlow> flows;
  std::vector<MessageId> chain;
  std::set<MessageId> on_chain;
  auto extend = [&](auto&& self, MessageId node) -> void {
    chain.push_back(node);
    on_chain.insert(node);
    if (dict.is_terminal(node)) {
      if (chain.size() >= 2) flows.push_back(EssentialFlow{chain});
    } else if (chain.size() < max_len) {
      auto it = next.find(node);
      if (it != next.end()) {
        for (auto tail : it->second) {
          if (!on_chain.count(tail) && !dict.is_initial(tail)) self(self, tail);
        }
      }
    }
    on_chain.erase(node);
    chain.pop_back();
  };
  for (auto root : dict.initial()) {
    if (next.count(root)) extend(extend, root);
  }
  std::sort(flows.begin(), flows.end(), [](const EssentialFlow& a, const EssentialFlow& b) {
    if (a.sequence.size() != b.sequence.size()) return a.sequence.size() > b.sequence.size();
    return a.sequence < b.sequence;
  });
  return flows;
}

namespace {

// Doubly linked view over the original positions; deletions keep the
// original indices, so ordering by index stays valid.
struct Chain {
  static constexpr std::size_t kNil = static_cast<std::size_t>(-1);
  std::vector<std::size_t> prev;
  std::vector<std::size_t> next;
  std::vector<char> alive;
  std::size_t head = kNil;

  explicit Chain(std::size_t n) : prev(n), next(n), alive(n, 1), head(n ? 0 : kNil) {
    for (std::size_t i = 0; i < n; ++i) {
      prev[i] = i == 0 ? kNil : i - 1;
      next[i] = i + 1 == n ? kNil : i + 1;
    }
  }

  void erase(std::size_t i) {
    alive[i] = 0;
    if (prev[i] != kNil) next[prev[i]] = next[i];
    else head = next[i];
    if (next[i] != kNil) prev[next[i]] = prev[i];
  }
};

bool matches_at(const Chain& chain, const std::vector<MessageId>& events, std::size_t start,
                const std::vector<MessageId>& flow) {
  auto pos = start;
  for (auto id : flow) {
    if (pos == Chain::kNil || events[pos] != id) return false;
    pos = chain.next[pos];
  }
  return true;
}

}  // namespace

EmfRemoval remove_emfs(const Trace& trace, const std::vector<EssentialFlow>& flows) {
  EmfRemoval result;
  const auto& events = trace.events;
  if (flows.empty() || events.empty()) {
    result.reduced = trace;
    return result;
  }

  std::size_t max_flow = 0;
  for (const auto& f : flows) max_flow = std::max(max_flow, f.sequence.size());

  // (−length, start, first id, flow index): the set's minimum is the next
  // deletion. Entries are validated lazily when popped.
  using Candidate = std::tuple<std::ptrdiff_t, std::size_t, MessageId, std::size_t>;
  std::set<Candidate> candidates;
  Chain chain(events.size());

  std::map<MessageId, std::vector<std::size_t>> by_first;
  for (std::size_t f = 0; f < flows.size(); ++f) {
    if (!flows[f].sequence.empty()) by_first[flows[f].sequence.front()].push_back(f);
  }
  auto scan_from = [&](std::size_t start) {
    auto it = by_first.find(events[start]);
    if (it == by_first.end()) return;
    for (auto f : it->second) {
      if (matches_at(chain, events, start, flows[f].sequence)) {
        candidates.emplace(-static_cast<std::ptrdiff_t>(flows[f].sequence.size()), start,
                           flows[f].sequence.front(), f);
      }
    }
  };
  for (std::size_t i = 0; i < events.size(); ++i) scan_from(i);

  while (!candidates.empty()) {
    auto [neg_len, start, first, f] = *candidates.begin();
    candidates.erase(candidates.begin());
    if (!chain.alive[start] || !matches_at(chain, events, start, flows[f].sequence)) continue;

    auto before = chain.prev[start];
    auto pos = start;
    for (std::size_t k = 0; k < flows[f].sequence.size(); ++k) {
      auto nxt = chain.next[pos];
      chain.erase(pos);
      pos = nxt;
    }
    result.removed_count += flows[f].sequence.size();
    result.removed_flows.push_back(f);

    // New occurrences must span the junction; they start at most
    // max_flow - 1 live positions before it.
    if (pos == Chain::kNil && before == Chain::kNil) break;
    std::size_t s = before;
    for (std::size_t back = 1; back < max_flow && s != Chain::kNil; ++back) {
      scan_from(s);
      s = chain.prev[s];
    }
  }

  for (auto i = chain.head; i != Chain::kNil; i = chain.next[i]) {
    result.reduced.events.push_back(events[i]);
  }
  return result;
}

void write_essential(std::ostream& out, const EssentialSet& essential) {
  for (const auto& e : essential.pairs) out << e.head << " -> " << e.tail << '\n';
}

}  // namespace flowmine
