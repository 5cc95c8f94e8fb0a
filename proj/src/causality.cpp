#include "flowmine/causality.hpp"

#include <algorithm>
#include <deque>
#include <iomanip>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace flowmine {

namespace {

// True when `to` is reachable from `from` over the current edge set.
bool reaches(const std::map<MessageId, std::vector<MessageId>>& adjacency, MessageId from,
             MessageId to) {
  if (from == to) return true;
  std::vector<MessageId> stack{from};
  std::set<MessageId> seen{from};
  while (!stack.empty()) {
    auto node = stack.back();
    stack.pop_back();
    auto it = adjacency.find(node);
    if (it == adjacency.end()) continue;
    for (auto next : it->second) {
      if (next == to) return true;
      if (seen.insert(next).second) stack.push_back(next);
    }
  }
  return false;
}

std::set<MessageId> forward_closure(const CausalityGraph& g, const std::set<MessageId>& start) {
  std::set<MessageId> seen(start.begin(), start.end());
  std::vector<MessageId> stack(start.begin(), start.end());
  while (!stack.empty()) {
    auto node = stack.back();
    stack.pop_back();
    for (auto next : g.successors(node)) {
      if (seen.insert(next).second) stack.push_back(next);
    }
  }
  return seen;
}

std::set<MessageId> backward_closure(const CausalityGraph& g, const std::set<MessageId>& start) {
  std::set<MessageId> seen(start.begin(), start.end());
  std::vector<MessageId> stack(start.begin(), start.end());
  while (!stack.empty()) {
    auto node = stack.back();
    stack.pop_back();
    for (auto prev : g.predecessors(node)) {
      if (seen.insert(prev).second) stack.push_back(prev);
    }
  }
  return seen;
}

std::uint64_t matched_pairs(const std::vector<std::size_t>& heads,
                            const std::vector<std::size_t>& tails) {
  // Merge the two sorted position lists; unmatched heads sit on a stack so the
  // nearest earlier one is paired first.
  std::uint64_t count = 0;
  std::size_t open = 0;
  std::size_t h = 0;
  for (auto t : tails) {
    while (h < heads.size() && heads[h] < t) {
      ++open;
      ++h;
    }
    if (open > 0) {
      --open;
      ++count;
    }
  }
  return count;
}

}  // namespace

const EdgeStats& CausalityGraph::stats(MessageId head, MessageId tail) const {
  auto it = edges.find(Edge{head, tail});
  if (it == edges.end()) {
    throw Error(ErrorKind::Reference, "no edge " + std::to_string(head) + " -> " +
                                          std::to_string(tail) + " in causality graph");
  }
  return it->second;
}

std::vector<MessageId> CausalityGraph::successors(MessageId id) const {
  std::vector<MessageId> out;
  for (auto it = edges.lower_bound(Edge{id, 0}); it != edges.end() && it->first.head == id; ++it) {
    out.push_back(it->first.tail);
  }
  return out;
}

std::vector<MessageId> CausalityGraph::predecessors(MessageId id) const {
  std::vector<MessageId> out;
  for (const auto& [edge, stats] : edges) {
    if (edge.tail == id) out.push_back(edge.head);
  }
  return out;
}

std::optional<std::vector<MessageId>> CausalityGraph::topological_order() const {
  std::map<MessageId, std::size_t> indegree;
  for (auto n : nodes) indegree[n] = 0;
  for (const auto& [edge, stats] : edges) ++indegree[edge.tail];
  std::priority_queue<MessageId, std::vector<MessageId>, std::greater<>> ready;
  for (auto [n, d] : indegree) {
    if (d == 0) ready.push(n);
  }
  std::vector<MessageId> order;
  while (!ready.empty()) {
    auto n = ready.top();
    ready.pop();
    order.push_back(n);
    for (auto next : successors(n)) {
      if (--indegree[next] == 0) ready.push(next);
    }
  }
  if (order.size() != indegree.size()) return std::nullopt;
  return order;
}

CausalityGraph construct_causality_graph(const TraceSet& traces, const MessageDictionary& dict) {
  std::set<MessageId> observed;
  for (const auto& trace : traces.traces) {
    for (auto id : trace.events) {
      dict.at(id);
      observed.insert(id);
    }
  }

  CausalityGraph graph;
  for (auto id : dict.initial()) {
    if (observed.count(id)) graph.roots.insert(id);
  }
  if (graph.roots.empty()) {
    throw Error(ErrorKind::EmptyModel, "no initial message occurs in the traces");
  }

  // Candidate edges in breadth-first discovery order.
  std::vector<Edge> candidates;
  std::set<MessageId> expanded;
  for (auto root : graph.roots) {
    if (expanded.count(root)) continue;
    std::deque<MessageId> queue{root};
    expanded.insert(root);
    while (!queue.empty()) {
      auto head = queue.front();
      queue.pop_front();
      if (dict.is_terminal(head)) continue;
      for (auto tail : observed) {
        if (dict.is_initial(tail) || !dict.causal(head, tail)) continue;
        candidates.push_back(Edge{head, tail});
        if (expanded.insert(tail).second) queue.push_back(tail);
      }
    }
  }

  // Request/response pairs make two-cycles (a->b, b->a); discovery order
  // alone would keep whichever direction the search met first. Inserting the
  // better supported edge first keeps the direction the traces agree with.
  std::vector<double> strength(candidates.size(), 0.0);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    double sum = 0.0;
    for (const auto& trace : traces.traces) {
      sum += forward_confidence(trace, candidates[k].head, candidates[k].tail) +
             backward_confidence(trace, candidates[k].head, candidates[k].tail);
    }
    strength[k] = sum;
  }
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return strength[a] > strength[b]; });

  std::map<MessageId, std::vector<MessageId>> adjacency;
  for (auto k : order) {
    auto e = candidates[k];
    if (reaches(adjacency, e.tail, e.head)) continue;  // would close a cycle
    adjacency[e.head].push_back(e.tail);
  }

  // Keep what is still reachable from a root.
  std::deque<MessageId> queue(graph.roots.begin(), graph.roots.end());
  graph.nodes = graph.roots;
  while (!queue.empty()) {
    auto head = queue.front();
    queue.pop_front();
    for (auto tail : adjacency[head]) {
      graph.edges.emplace(Edge{head, tail}, EdgeStats{});
      if (graph.nodes.insert(tail).second) queue.push_back(tail);
    }
  }
  for (auto id : graph.nodes) {
    if (dict.is_terminal(id)) graph.terminals.insert(id);
    graph.node_support[id] = 0;
  }
  return graph;
}

std::uint64_t node_support(const Trace& trace, MessageId id) {
  return static_cast<std::uint64_t>(std::count(trace.events.begin(), trace.events.end(), id));
}

std::uint64_t edge_support(const Trace& trace, MessageId head, MessageId tail) {
  std::vector<std::size_t> heads;
  std::vector<std::size_t> tails;
  for (std::size_t p = 0; p < trace.events.size(); ++p) {
    if (trace.events[p] == head) heads.push_back(p);
    if (trace.events[p] == tail) tails.push_back(p);
  }
  return matched_pairs(heads, tails);
}

double forward_confidence(const Trace& trace, MessageId head, MessageId tail) {
  auto denom = node_support(trace, head);
  if (denom == 0) return 0.0;
  return static_cast<double>(edge_support(trace, head, tail)) / static_cast<double>(denom);
}

double backward_confidence(const Trace& trace, MessageId head, MessageId tail) {
  auto denom = node_support(trace, tail);
  if (denom == 0) return 0.0;
  return static_cast<double>(edge_support(trace, head, tail)) / static_cast<double>(denom);
}

void aggregate_statistics(const TraceSet& traces, CausalityGraph& graph,
                          ZeroSupportPolicy policy) {
  struct Accum {
    std::uint64_t support = 0;
    double forward_sum = 0.0;
    double backward_sum = 0.0;
    std::size_t forward_n = 0;
    std::size_t backward_n = 0;
  };
  std::map<Edge, Accum> accum;
  for (auto& [id, support] : graph.node_support) support = 0;

  for (const auto& trace : traces.traces) {
    std::unordered_map<MessageId, std::vector<std::size_t>> positions;
    for (std::size_t p = 0; p < trace.events.size(); ++p) {
      if (graph.nodes.count(trace.events[p])) positions[trace.events[p]].push_back(p);
    }
    for (const auto& [id, pos] : positions) graph.node_support[id] += pos.size();

    static const std::vector<std::size_t> kNone;
    for (const auto& [edge, stats] : graph.edges) {
      auto h = positions.find(edge.head);
      auto t = positions.find(edge.tail);
      const auto& hp = h == positions.end() ? kNone : h->second;
      const auto& tp = t == positions.end() ? kNone : t->second;
      auto support = matched_pairs(hp, tp);
      auto& a = accum[edge];
      a.support += support;
      if (!hp.empty()) {
        a.forward_sum += static_cast<double>(support) / static_cast<double>(hp.size());
        ++a.forward_n;
      } else if (policy == ZeroSupportPolicy::ContributeZero) {
        ++a.forward_n;
      }
      if (!tp.empty()) {
        a.backward_sum += static_cast<double>(support) / static_cast<double>(tp.size());
        ++a.backward_n;
      } else if (policy == ZeroSupportPolicy::ContributeZero) {
        ++a.backward_n;
      }
    }
  }

  for (auto& [edge, stats] : graph.edges) {
    const auto& a = accum[edge];
    stats.support = a.support;
    stats.forward = a.forward_n ? a.forward_sum / static_cast<double>(a.forward_n) : 0.0;
    stats.backward = a.backward_n ? a.backward_sum / static_cast<double>(a.backward_n) : 0.0;
  }
}

PrunedGraph prune(const CausalityGraph& graph, double theta, const std::set<Edge>& essential) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "pruning threshold must lie in [0,1]");
  }
  PrunedGraph pruned;
  pruned.theta = theta;
  auto& g = pruned.graph;
  g.nodes = graph.nodes;
  g.roots = graph.roots;
  g.terminals = graph.terminals;
  for (const auto& [edge, stats] : graph.edges) {
    bool keep_essential = essential.count(edge) != 0;
    if (keep_essential) pruned.essential_edges.insert(edge);
    if (keep_essential || stats.combined() >= theta) g.edges.emplace(edge, stats);
  }

  auto live = forward_closure(g, g.roots);
  auto useful = backward_closure(g, g.terminals);
  std::set<MessageId> keep;
  std::set_intersection(live.begin(), live.end(), useful.begin(), useful.end(),
                        std::inserter(keep, keep.end()));

  std::set<MessageId> roots;
  std::set<MessageId> terminals;
  for (auto r : g.roots) {
    if (keep.count(r)) roots.insert(r);
  }
  for (auto t : g.terminals) {
    if (keep.count(t)) terminals.insert(t);
  }
  if (roots.empty() || terminals.empty()) {
    std::ostringstream os;
    os << "pruning at theta=" << theta
       << " disconnects every root from every terminal; try a lower theta";
    throw Error(ErrorKind::OverPruned, os.str());
  }
  for (auto it = g.edges.begin(); it != g.edges.end();) {
    if (!keep.count(it->first.head) || !keep.count(it->first.tail)) {
      it = g.edges.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = pruned.essential_edges.begin(); it != pruned.essential_edges.end();) {
    it = g.edges.count(*it) ? std::next(it) : pruned.essential_edges.erase(it);
  }
  g.nodes = std::move(keep);
  g.roots = std::move(roots);
  g.terminals = std::move(terminals);
  for (auto id : g.nodes) g.node_support[id] = graph.node_support.count(id) ? graph.node_support.at(id) : 0;
  return pruned;
}

void write_dot(std::ostream& out, const CausalityGraph& graph, const MessageDictionary& dict,
               const std::set<Edge>& highlight) {
  out << "digraph causality {\n";
  out << "  rankdir=TB;\n";
  for (auto id : graph.nodes) {
    out << "  " << id << " [label=\"" << id << ": " << dict.at(id).quadruple() << "\"";
    if (graph.roots.count(id)) out << ", shape=box";
    if (graph.terminals.count(id)) out << ", peripheries=2";
    out << "];\n";
  }
  out << std::fixed << std::setprecision(3);
  for (const auto& [edge, stats] : graph.edges) {
    out << "  " << edge.head << " -> " << edge.tail << " [label=\"f=" << stats.forward
        << ", b=" << stats.backward << ", s=" << stats.support << "\"";
    if (highlight.count(edge)) out << ", style=bold";
    out << "];\n";
  }
  out << "}\n";
}

}  // namespace flowmine
