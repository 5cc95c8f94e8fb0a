#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flowmine/causality.hpp"
#include "flowmine/mining.hpp"
#include "flowmine/trace_model.hpp"

namespace flowmine::synth {

/// A ground-truth message flow: a DAG rooted at one initial message whose
/// sinks are its terminal messages.
struct FlowSpec {
  std::string name;
  std::set<MessageId> nodes;
  std::set<Edge> edges;
  MessageId initial = 0;
  std::set<MessageId> terminals;

  /// Every root-to-sink path, lexicographically ordered.
  std::vector<std::vector<MessageId>> paths() const;
  /// Throws InvalidArgument unless the DAG is acyclic, has a single source
  /// equal to `initial`, and its sinks are exactly `terminals`.
  void validate() const;
};

/// Flows plus the vocabulary their nodes draw from.
struct FlowLibrary {
  MessageDictionary dict;
  std::vector<FlowSpec> flows;

  const FlowSpec& flow(std::string_view name) const;
};

/// Flow file:
///   flow <name>
///   <id> (<src>:<dest>:<cmd>:<type>)    node declarations
///   <h> -> <t>                          edges
/// Nodes are shared across flows by id and must agree on their quadruple.
/// Each flow's source is its initial message and its sinks are terminals.
FlowLibrary parse_flow_library(std::istream& in);
FlowLibrary parse_flow_library(std::string_view text);
void write_flow_library(std::ostream& out, const FlowLibrary& library);

struct DropRule {
  MessageId id = 0;
  double probability = 1.0;
};

struct GenerationConfig {
  /// Names of flows to execute; empty selects every flow of the library.
  std::vector<std::string> flows;
  std::size_t instances_per_flow = 1;
  /// Per-flow instance counts overriding instances_per_flow.
  std::map<std::string, std::size_t> instance_overrides;
  std::uint64_t seed = 0;
  std::size_t max_concurrent = 4;
  std::optional<DropRule> drop;
  /// Independent traces, each carrying the full instance mix.
  std::size_t trace_count = 1;

  void validate() const;
};

struct GenerationResult {
  MessageDictionary dict;
  TraceSet traces;
  FlowModel ground_truth;
};

/// Seeded interleaving of flow executions. Each execution follows one path
/// drawn uniformly from its flow; at each step the scheduler emits the next
/// message of a uniformly chosen live execution, admitting queued executions
/// while fewer than max_concurrent are live.
GenerationResult generate(const FlowLibrary& library, const GenerationConfig& config);

/// Acceptance ratio of the ground-truth flows on `traces`. Throws EmptyModel
/// on an empty trace set.
double project_ground_truth_ar(const TraceSet& traces, const FlowModel& ground_truth);

/// The shipped ten-flow memory/peripheral fixture.
const FlowLibrary& fixture_library();
std::string_view fixture_text();

struct Preset {
  std::string name;
  GenerationConfig config;
};

/// `small-20`, `large-10` or `large-20`; throws InvalidArgument otherwise.
Preset preset(std::string_view name, std::uint64_t seed);
std::vector<std::string> preset_names();

}  // namespace flowmine::synth
