#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include "flowmine/trace_model.hpp"

namespace flowmine {

/// Directed causality edge `head -> tail`.
struct Edge {
  MessageId head = 0;
  MessageId tail = 0;

  auto operator<=>(const Edge&) const = default;
};

struct EdgeStats {
  std::uint64_t support = 0;  // summed over traces, diagnostics only
  double forward = 0.0;       // mean over traces of support / NodeSupport(head)
  double backward = 0.0;      // mean over traces of support / NodeSupport(tail)

  double combined() const { return (forward + backward) / 2.0; }
};

/// DAG over the unique messages observed in a trace set.
struct CausalityGraph {
  std::set<MessageId> nodes;
  std::set<MessageId> roots;
  std::set<MessageId> terminals;
  std::map<Edge, EdgeStats> edges;
  std::map<MessageId, std::uint64_t> node_support;

  bool has_edge(MessageId head, MessageId tail) const {
    return edges.count(Edge{head, tail}) != 0;
  }
  const EdgeStats& stats(MessageId head, MessageId tail) const;
  std::vector<MessageId> successors(MessageId id) const;
  std::vector<MessageId> predecessors(MessageId id) const;

  /// Kahn order, ascending id among ready nodes. Empty optional on a cycle.
  std::optional<std::vector<MessageId>> topological_order() const;
};

struct PrunedGraph {
  CausalityGraph graph;
  double theta = 0.0;
  std::set<Edge> essential_edges;
};

/// How a trace that lacks an edge's head (or tail) contributes to the mean
/// forward (or backward) confidence.
enum class ZeroSupportPolicy {
  ContributeZero,  // counts as a 0 ratio in the mean
  SkipTrace,       // excluded from the mean's denominator
};

/// Builds the structural-causality DAG. Roots are the observed initial
/// messages; candidate edges come from a breadth-first expansion from each
/// root in ascending id order that stops at terminal messages and never
/// targets an initial message. Candidates are inserted strongest first (summed
/// forward + backward confidence, ties in discovery order), skipping any edge
/// that would close a cycle; nodes left unreachable are dropped. Statistics
/// are left zeroed. Throws EmptyModel if no initial message occurs.
CausalityGraph construct_causality_graph(const TraceSet& traces, const MessageDictionary& dict);

std::uint64_t node_support(const Trace& trace, MessageId id);

/// Pairs each `tail` instance with the nearest earlier unmatched `head`
/// instance; returns the number of paired tails.
std::uint64_t edge_support(const Trace& trace, MessageId head, MessageId tail);

/// 0 when `head` does not occur in the trace.
double forward_confidence(const Trace& trace, MessageId head, MessageId tail);
/// 0 when `tail` does not occur in the trace.
double backward_confidence(const Trace& trace, MessageId head, MessageId tail);

/// Fills supports (sums) and confidences (per-trace means) for every edge.
void aggregate_statistics(const TraceSet& traces, CausalityGraph& graph,
                          ZeroSupportPolicy policy = ZeroSupportPolicy::ContributeZero);

/// Keeps edges whose combined confidence reaches `theta` plus every essential
/// edge, then trims nodes that are unreachable from a root or cannot reach a
/// terminal. Throws InvalidArgument for theta outside [0,1] and OverPruned
/// when no root reaches any terminal.
PrunedGraph prune(const CausalityGraph& graph, double theta, const std::set<Edge>& essential);

/// `id: src:dest:cmd:type` nodes, `f=.., b=.., s=..` edges.
void write_dot(std::ostream& out, const CausalityGraph& graph, const MessageDictionary& dict,
               const std::set<Edge>& highlight = {});

}  // namespace flowmine
