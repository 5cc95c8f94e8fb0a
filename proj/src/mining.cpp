#include "flowmine/mining.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace flowmine {

bool Path::contains(MessageId id) const {
  return std::find(sequence.begin(), sequence.end(), id) != sequence.end();
}

FlowModel::FlowModel(std::vector<Path> paths) {
  for (auto& p : paths) add(std::move(p));
}

bool FlowModel::add(Path path) {
  if (!index_.insert(path.sequence).second) return false;
  paths_.push_back(std::move(path));
  return true;
}

bool FlowModel::remove(const std::vector<MessageId>& sequence) {
  if (!index_.erase(sequence)) return false;
  paths_.erase(std::find_if(paths_.begin(), paths_.end(),
                            [&](const Path& p) { return p.sequence == sequence; }));
  return true;
}

bool FlowModel::contains(const std::vector<MessageId>& sequence) const {
  return index_.count(sequence) != 0;
}

std::set<MessageId> FlowModel::messages() const {
  std::set<MessageId> out;
  for (const auto& p : paths_) out.insert(p.sequence.begin(), p.sequence.end());
  return out;
}

FlowAcceptor compile_acceptor(const FlowModel& model) {
  FlowAcceptor acceptor;
  for (const auto& p : model.paths()) acceptor.add_sequence(p.sequence);
  return acceptor;
}

EvaluationResult evaluate(const TraceSet& traces, const FlowModel& model,
                          const std::vector<EssentialFlow>& emfs,
                          const EvaluationOptions& options) {
  return evaluate(traces, compile_acceptor(model), emfs, options);
}

void score_path(Path& path, const CausalityGraph& graph, const EssentialSet& essential,
                double w_essential) {
  path.forward_score = 0.0;
  path.backward_score = 0.0;
  path.essential_count = 0;
  path.score = 0.0;
  if (path.sequence.size() < 2) return;
  auto edge_count = path.sequence.size() - 1;
  for (std::size_t k = 0; k + 1 < path.sequence.size(); ++k) {
    const auto& s = graph.stats(path.sequence[k], path.sequence[k + 1]);
    path.forward_score += s.forward;
    path.backward_score += s.backward;
    if (essential.contains(path.sequence[k], path.sequence[k + 1])) ++path.essential_count;
  }
  path.forward_score /= static_cast<double>(edge_count);
  path.backward_score /= static_cast<double>(edge_count);
  path.score = (path.forward_score + path.backward_score) / static_cast<double>(path.sequence.size()) +
               w_essential * static_cast<double>(path.essential_count) /
                   static_cast<double>(edge_count);
}

double path_score(const Path& path, const CausalityGraph& graph, const EssentialSet& essential,
                  double w_essential) {
  Path copy{path.sequence};
  score_path(copy, graph, essential, w_essential);
  return copy.score;
}

namespace {

// Depth-first walk from `root`. With `ranked`, successors are tried in
// descending combined confidence. Stops once `limit` paths are collected and
// reports whether more existed.
bool walk_paths(const CausalityGraph& g, MessageId root, std::size_t max_len, std::size_t limit,
                bool ranked, std::vector<std::vector<MessageId>>& out) {
  std::map<MessageId, std::vector<MessageId>> succ;
  for (auto n : g.nodes) {
    auto next = g.successors(n);
    if (ranked) {
      std::stable_sort(next.begin(), next.end(), [&](MessageId a, MessageId b) {
        return g.stats(n, a).combined() > g.stats(n, b).combined();
      });
    }
    succ[n] = std::move(next);
  }
  std::vector<MessageId> chain;
  bool overflow = false;
  auto visit = [&](auto&& self, MessageId node) -> void {
    if (overflow) return;
    chain.push_back(node);
    if (g.terminals.count(node)) {
      if (chain.size() >= 2) {
        if (out.size() >= limit) {
          overflow = true;
        } else {
          out.push_back(chain);
        }
      }
    } else if (chain.size() < max_len) {
      for (auto next : succ[node]) self(self, next);
    }
    chain.pop_back();
  };
  visit(visit, root);
  return overflow;
}

}  // namespace

PathEnumeration enumerate_paths(const PrunedGraph& pruned, const EssentialSet& essential,
                                const EnumerationLimits& limits, double w_essential) {
  if (limits.max_len < 2) {
    throw Error(ErrorKind::InvalidArgument, "maximum path length must be at least 2");
  }
  const auto& g = pruned.graph;
  PathEnumeration result;
  std::size_t quota = std::max<std::size_t>(1, limits.max_paths / std::max<std::size_t>(1, g.roots.size()));
  for (auto root : g.roots) {
    std::vector<std::vector<MessageId>> sequences;
    if (walk_paths(g, root, limits.max_len, quota, false, sequences)) {
      result.truncated = true;
      sequences.clear();
      walk_paths(g, root, limits.max_len, quota, true, sequences);
      std::sort(sequences.begin(), sequences.end());
    }
    for (auto& s : sequences) {
      Path p{std::move(s)};
      score_path(p, g, essential, w_essential);
      result.paths.push_back(std::move(p));
    }
  }
  if (result.paths.empty()) {
    throw Error(ErrorKind::EmptyModel, "the pruned graph has no root-to-terminal path within " +
                                           std::to_string(limits.max_len) + " messages");
  }
  return result;
}

SelectionResult select_base_model(const PrunedGraph& pruned, const std::vector<Path>& candidates,
                                  SelectionStrategy strategy) {
  const auto& g = pruned.graph;
  SelectionResult result;
  std::set<MessageId> uncovered = g.nodes;

  std::map<MessageId, std::vector<const Path*>> by_root;
  for (const auto& p : candidates) {
    if (!p.sequence.empty()) by_root[p.sequence.front()].push_back(&p);
  }
  std::set<const Path*> taken;

  auto key = [&](const Path& p) {
    std::size_t fresh = 0;
    for (auto id : std::set<MessageId>(p.sequence.begin(), p.sequence.end())) {
      fresh += uncovered.count(id);
    }
    if (strategy == SelectionStrategy::CoverageFirst) {
      return std::make_tuple(fresh, p.sequence.size(), p.essential_count, fresh);
    }
    return std::make_tuple(p.sequence.size(), fresh, p.essential_count, fresh);
  };

  bool progress = true;
  while (!uncovered.empty() && progress) {
    progress = false;
    for (auto root : g.roots) {
      const Path* best = nullptr;
      std::tuple<std::size_t, std::size_t, std::size_t, std::size_t> best_key{};
      for (const auto* p : by_root[root]) {
        if (taken.count(p)) continue;
        auto k = key(*p);
        if (std::get<3>(k) == 0) continue;
        // Candidates are visited in lexicographic order, so strict > keeps
        // the smallest sequence on ties.
        if (!best || k > best_key) {
          best = p;
          best_key = k;
        }
      }
      if (!best) continue;
      taken.insert(best);
      result.model.add(*best);
      for (auto id : best->sequence) uncovered.erase(id);
      progress = true;
    }
  }
  result.uncovered = std::move(uncovered);
  return result;
}

RefineResult refine(const FlowModel& model, const TraceSet& traces,
                    const std::vector<Path>& candidates, const std::vector<EssentialFlow>& emfs,
                    const RefineOptions& options) {
  if (!(options.accuracy > 0.0 && options.accuracy <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "accuracy threshold must lie in (0,1]");
  }
  std::vector<const Path*> sorted;
  for (const auto& p : candidates) {
    if (!model.contains(p.sequence)) sorted.push_back(&p);
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Path* a, const Path* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->sequence < b->sequence;
  });

  RefineResult result;
  result.candidate_count = sorted.size();
  FlowModel current = model;
  auto acceptor = compile_acceptor(current);
  auto eval = evaluate(traces, acceptor, emfs, options.evaluation);
  result.initial_ratio = eval.acceptance_ratio;
  result.model = current;
  result.evaluation = eval;

  while (eval.acceptance_ratio < options.accuracy && !sorted.empty()) {
    std::vector<std::vector<MessageId>> stale;
    for (const auto& p : current.paths()) {
      for (const auto& t : acceptor.transitions_of(p.sequence)) {
        if (eval.unused_edges.count(t)) {
          stale.push_back(p.sequence);
          break;
        }
      }
    }
    for (const auto& s : stale) current.remove(s);

    std::vector<std::pair<std::size_t, MessageId>> pressure;
    for (const auto& [m, n] : eval.unaccepted_counts) pressure.emplace_back(n, m);
    std::sort(pressure.begin(), pressure.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    bool added = false;
    for (const auto& [count, message] : pressure) {
      auto it = std::find_if(sorted.begin(), sorted.end(),
                             [m = message](const Path* p) { return p->contains(m); });
      if (it == sorted.end()) continue;
      current.add(**it);
      sorted.erase(it);
      added = true;
      break;
    }
    if (!added) break;

    acceptor = compile_acceptor(current);
    eval = evaluate(traces, acceptor, emfs, options.evaluation);
    ++result.iterations;
    if (eval.acceptance_ratio > result.evaluation.acceptance_ratio) {
      result.model = current;
      result.evaluation = eval;
    }
  }
  result.below_threshold = result.evaluation.acceptance_ratio < options.accuracy;
  return result;
}

MiningResult mine(const TraceSet& traces, const MessageDictionary& dict,
                  const MiningOptions& options) {
  if (traces.empty()) throw Error(ErrorKind::EmptyModel, "no traces to mine");
  if (!(options.accuracy >= 0.0 && options.accuracy <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "accuracy threshold must lie in [0,1]");
  }
  if (options.max_len < 2) {
    throw Error(ErrorKind::InvalidArgument, "maximum path length must be at least 2");
  }

  MiningResult result;
  result.graph = construct_causality_graph(traces, dict);
  result.essential = extract_essential(traces, dict);
  aggregate_statistics(traces, result.graph, options.zero_support);
  result.pruned = prune(result.graph, options.theta, result.essential.pairs);
  auto enumeration = enumerate_paths(result.pruned, result.essential,
                                     EnumerationLimits{options.max_len, options.max_paths},
                                     options.w_essential);
  result.candidates = std::move(enumeration.paths);
  result.truncated = enumeration.truncated;
  // Only essential flows that are model paths are ever stripped, and model
  // paths are candidates, so the fully essential candidates are all the
  // flows evaluation can use. Enumerating every essential chain instead
  // explodes on long interleaved traces.
  if (options.emf) {
    for (const auto& c : result.candidates) {
      if (c.essential_count + 1 == c.length()) result.emfs.push_back(EssentialFlow{c.sequence});
    }
    std::sort(result.emfs.begin(), result.emfs.end(),
              [](const EssentialFlow& a, const EssentialFlow& b) {
                if (a.sequence.size() != b.sequence.size()) {
                  return a.sequence.size() > b.sequence.size();
                }
                return a.sequence < b.sequence;
              });
  }
  if (result.truncated) {
    result.warnings.push_back("path enumeration truncated at " +
                              std::to_string(options.max_paths) + " paths");
  }

  auto selection = select_base_model(result.pruned, result.candidates, options.strategy);
  if (!selection.uncovered.empty()) {
    std::ostringstream os;
    os << "base model leaves " << selection.uncovered.size() << " message(s) uncovered: "
       << format_sequence({selection.uncovered.begin(), selection.uncovered.end()}, ",");
    result.warnings.push_back(os.str());
  }
  result.base_model = std::move(selection.model);

  EvaluationOptions eval_options{options.instance_cap, options.jobs};
  result.base_evaluation = evaluate(traces, result.base_model, result.emfs, eval_options);
  result.model = result.base_model;
  result.evaluation = result.base_evaluation;

  if (result.base_evaluation.acceptance_ratio < options.accuracy) {
    auto refined = refine(result.base_model, traces, result.candidates, result.emfs,
                          RefineOptions{options.accuracy, eval_options});
    result.model = std::move(refined.model);
    result.evaluation = std::move(refined.evaluation);
    result.iterations = refined.iterations;
    result.below_threshold = refined.below_threshold;
  }
  if (result.evaluation.traces_capped) {
    result.warnings.push_back(std::to_string(result.evaluation.traces_capped) +
                              " trace(s) exceeded the live-instance cap");
  }
  return result;
}

}  // namespace flowmine
