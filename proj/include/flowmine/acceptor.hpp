#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "flowmine/essential.hpp"
#include "flowmine/trace_model.hpp"

namespace flowmine {

using StateId = std::uint32_t;

/// A transition is named by its source state and symbol; the target is
/// implied because the acceptor is deterministic.
struct Transition {
  StateId from = 0;
  MessageId symbol = 0;

  auto operator<=>(const Transition&) const = default;
};

/// Prefix-tree acceptor over a set of message sequences. State 0 is q0.
class FlowAcceptor {
 public:
  FlowAcceptor() : children_(1), parent_(1, 0), depth_(1, 0), accepting_(1, 0) {}

  /// Adds `sequence`, sharing the longest existing prefix. Returns the end
  /// state, which becomes accepting.
  StateId add_sequence(const std::vector<MessageId>& sequence);

  static constexpr StateId initial_state() { return 0; }
  std::size_t state_count() const { return children_.size(); }
  std::size_t transition_count() const { return children_.size() - 1; }

  std::optional<StateId> next(StateId state, MessageId symbol) const;
  bool is_accepting(StateId state) const { return accepting_[state] != 0; }
  bool is_leaf(StateId state) const { return children_[state].empty(); }
  /// Number of messages consumed to reach `state`.
  std::size_t depth(StateId state) const { return depth_[state]; }
  StateId parent(StateId state) const { return parent_[state]; }

  std::set<MessageId> alphabet() const;
  std::set<StateId> accepting_states() const;
  std::set<Transition> transitions() const;
  /// Transitions fired while reading `sequence` from q0; empty if rejected.
  std::vector<Transition> transitions_of(const std::vector<MessageId>& sequence) const;

 private:
  // Children are kept sorted by symbol.
  std::vector<std::vector<std::pair<MessageId, StateId>>> children_;
  std::vector<StateId> parent_;
  std::vector<std::size_t> depth_;
  std::vector<char> accepting_;
};

struct TraceEvaluation {
  std::size_t length = 0;
  std::size_t accepted = 0;
  std::size_t emf_removed = 0;
  std::map<MessageId, std::size_t> unaccepted;
  std::set<Transition> fired;
  /// Completed instances keyed by the number of messages they matched.
  std::map<std::size_t, std::size_t> completed_by_length;
  bool instance_cap_hit = false;

  double ratio() const {
    return length == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(length);
  }
};

struct EvaluationResult {
  double acceptance_ratio = 0.0;
  std::map<MessageId, std::size_t> unaccepted_counts;
  std::set<Transition> unused_edges;
  std::vector<double> per_trace_ratios;
  std::vector<std::size_t> per_trace_accepted;
  std::vector<std::size_t> per_trace_length;
  std::map<std::size_t, std::size_t> completed_by_length;
  std::size_t emf_removed = 0;
  std::size_t traces_capped = 0;
};

struct EvaluationOptions {
  /// Live-instance bound per trace; messages after it is exceeded are
  /// counted as unaccepted.
  std::size_t instance_cap = 10000;
  /// Worker threads for the per-trace pass; results are reduced in trace
  /// order, so the output does not depend on this value.
  unsigned jobs = 1;
};

/// Runs one trace through the acceptor. A symbol with a q0 transition spawns
/// a new instance; any other symbol is offered to live instances oldest
/// first. Instances retire at accepting leaves. Essential flows are first
/// stripped from the trace where they occur contiguously, whether or not the
/// model contains them; the removed messages count as accepted and those the
/// acceptor recognises are replayed to mark the transitions they use.
TraceEvaluation evaluate_trace(const Trace& trace, const FlowAcceptor& acceptor,
                               const std::vector<EssentialFlow>& emfs = {},
                               const EvaluationOptions& options = {});

EvaluationResult evaluate(const TraceSet& traces, const FlowAcceptor& acceptor,
                          const std::vector<EssentialFlow>& emfs = {},
                          const EvaluationOptions& options = {});

}  // namespace flowmine
