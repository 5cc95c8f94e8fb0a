#include "flowmine/acceptor.hpp"

#include <algorithm>
#include <thread>

namespace flowmine {

StateId FlowAcceptor::add_sequence(const std::vector<MessageId>& sequence) {
  StateId state = initial_state();
  for (auto symbol : sequence) {
    auto& kids = children_[state];
    auto it = std::lower_bound(kids.begin(), kids.end(), symbol,
                               [](const auto& kid, MessageId s) { return kid.first < s; });
    if (it != kids.end() && it->first == symbol) {
      state = it->second;
      continue;
    }
    auto fresh = static_cast<StateId>(children_.size());
    kids.insert(it, {symbol, fresh});
    children_.emplace_back();
    parent_.push_back(state);
    depth_.push_back(depth_[state] + 1);
    accepting_.push_back(0);
    state = fresh;
  }
  if (state != initial_state()) accepting_[state] = 1;
  return state;
}

std::optional<StateId> FlowAcceptor::next(StateId state, MessageId symbol) const {
  const auto& kids = children_[state];
  auto it = std::lower_bound(kids.begin(), kids.end(), symbol,
                             [](const auto& kid, MessageId s) { return kid.first < s; });
  if (it == kids.end() || it->first != symbol) return std::nullopt;
  return it->second;
}

std::set<MessageId> FlowAcceptor::alphabet() const {
  std::set<MessageId> out;
  for (const auto& kids : children_) {
    for (const auto& [symbol, target] : kids) out.insert(symbol);
  }
  return out;
}

std::set<StateId> FlowAcceptor::accepting_states() const {
  std::set<StateId> out;
  for (StateId s = 0; s < accepting_.size(); ++s) {
    if (accepting_[s]) out.insert(s);
  }
  return out;
}

std::set<Transition> FlowAcceptor::transitions() const {
  std::set<Transition> out;
  for (StateId s = 0; s < children_.size(); ++s) {
    for (const auto& [symbol, target] : children_[s]) out.insert(Transition{s, symbol});
  }
  return out;
}

std::vector<Transition> FlowAcceptor::transitions_of(const std::vector<MessageId>& sequence) const {
  std::vector<Transition> out;
  StateId state = initial_state();
  for (auto symbol : sequence) {
    auto target = next(state, symbol);
    if (!target) return {};
    out.push_back(Transition{state, symbol});
    state = *target;
  }
  return out;
}

namespace {

struct Instance {
  StateId state;
  bool live;
};

void replay_removed(const std::vector<MessageId>& sequence, const FlowAcceptor& acceptor,
                    TraceEvaluation& eval) {
  auto fired = acceptor.transitions_of(sequence);
  if (fired.empty()) return;
  eval.fired.insert(fired.begin(), fired.end());
  auto end = *acceptor.next(fired.back().from, fired.back().symbol);
  if (acceptor.is_accepting(end)) ++eval.completed_by_length[sequence.size()];
}

}  // namespace

TraceEvaluation evaluate_trace(const Trace& trace, const FlowAcceptor& acceptor,
                               const std::vector<EssentialFlow>& emfs,
                               const EvaluationOptions& options) {
  TraceEvaluation eval;
  eval.length = trace.size();

  const Trace* input = &trace;
  EmfRemoval removal;
  if (!emfs.empty()) {
    removal = remove_emfs(trace, emfs);
    eval.emf_removed = removal.removed_count;
    eval.accepted += removal.removed_count;
    for (auto f : removal.removed_flows) replay_removed(emfs[f].sequence, acceptor, eval);
    input = &removal.reduced;
  }

  std::vector<Instance> instances;
  std::size_t live = 0;
  std::size_t first_live = 0;
  for (auto m : input->events) {
    if (eval.instance_cap_hit) {
      ++eval.unaccepted[m];
      continue;
    }
    if (auto start = acceptor.next(FlowAcceptor::initial_state(), m)) {
      eval.fired.insert(Transition{FlowAcceptor::initial_state(), m});
      ++eval.accepted;
      if (acceptor.is_leaf(*start)) {
        ++eval.completed_by_length[acceptor.depth(*start)];
      } else {
        instances.push_back(Instance{*start, true});
        if (++live > options.instance_cap) eval.instance_cap_hit = true;
      }
      continue;
    }
    bool taken = false;
    for (std::size_t k = first_live; k < instances.size(); ++k) {
      auto& inst = instances[k];
      if (!inst.live) continue;
      auto target = acceptor.next(inst.state, m);
      if (!target) continue;
      eval.fired.insert(Transition{inst.state, m});
      inst.state = *target;
      taken = true;
      if (acceptor.is_leaf(inst.state)) {
        ++eval.completed_by_length[acceptor.depth(inst.state)];
        inst.live = false;
        --live;
      }
      break;
    }
    if (taken) {
      ++eval.accepted;
      while (first_live < instances.size() && !instances[first_live].live) ++first_live;
      if (first_live > 4096 && first_live * 2 > instances.size()) {
        instances.erase(instances.begin(), instances.begin() + static_cast<std::ptrdiff_t>(first_live));
        first_live = 0;
      }
    } else {
      ++eval.unaccepted[m];
    }
  }
  for (std::size_t k = first_live; k < instances.size(); ++k) {
    const auto& inst = instances[k];
    if (inst.live && acceptor.is_accepting(inst.state)) {
      ++eval.completed_by_length[acceptor.depth(inst.state)];
    }
  }
  return eval;
}

EvaluationResult evaluate(const TraceSet& traces, const FlowAcceptor& acceptor,
                          const std::vector<EssentialFlow>& emfs,
                          const EvaluationOptions& options) {
  std::vector<TraceEvaluation> parts(traces.size());
  unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1 || traces.size() < 2) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
      parts[i] = evaluate_trace(traces.traces[i], acceptor, emfs, options);
    }
  } else {
    std::vector<std::thread> workers;
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(traces.size()));
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < traces.size(); i += jobs) {
          parts[i] = evaluate_trace(traces.traces[i], acceptor, emfs, options);
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  EvaluationResult result;
  result.unused_edges = acceptor.transitions();
  double sum = 0.0;
  for (const auto& part : parts) {
    result.per_trace_ratios.push_back(part.ratio());
    result.per_trace_accepted.push_back(part.accepted);
    result.per_trace_length.push_back(part.length);
    sum += part.ratio();
    for (const auto& [m, n] : part.unaccepted) result.unaccepted_counts[m] += n;
    for (const auto& t : part.fired) result.unused_edges.erase(t);
    for (const auto& [len, n] : part.completed_by_length) result.completed_by_length[len] += n;
    result.emf_removed += part.emf_removed;
    if (part.instance_cap_hit) ++result.traces_capped;
  }
  result.acceptance_ratio = parts.empty() ? 0.0 : sum / static_cast<double>(parts.size());
  return result;
}

}  // namespace flowmine
