#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowmine/acceptor.hpp"
#include "flowmine/causality.hpp"
#include "flowmine/essential.hpp"
#include "flowmine/trace_model.hpp"

namespace flowmine {

/// A root-to-terminal message sequence with its scores.
struct Path {
  std::vector<MessageId> sequence;
  double forward_score = 0.0;
  double backward_score = 0.0;
  std::size_t essential_count = 0;
  double score = 0.0;

  std::size_t length() const { return sequence.size(); }
  bool contains(MessageId id) const;
};

/// Insertion-ordered set of paths, unique by sequence.
class FlowModel {
 public:
  FlowModel() = default;
  explicit FlowModel(std::vector<Path> paths);

  /// False (and no change) if the sequence is already present.
  bool add(Path path);
  bool remove(const std::vector<MessageId>& sequence);
  bool contains(const std::vector<MessageId>& sequence) const;

  const std::vector<Path>& paths() const { return paths_; }
  std::size_t size() const { return paths_.size(); }
  bool empty() const { return paths_.empty(); }
  std::set<MessageId> messages() const;

 private:
  std::vector<Path> paths_;
  std::set<std::vector<MessageId>> index_;
};

FlowAcceptor compile_acceptor(const FlowModel& model);

EvaluationResult evaluate(const TraceSet& traces, const FlowModel& model,
                          const std::vector<EssentialFlow>& emfs = {},
                          const EvaluationOptions& options = {});

/// Fills forward/backward scores, essential count and the final score:
/// (mean forward + mean backward) / message count
///   + w_essential * essential_count / edge_count.
void score_path(Path& path, const CausalityGraph& graph, const EssentialSet& essential,
                double w_essential);
double path_score(const Path& path, const CausalityGraph& graph, const EssentialSet& essential,
                  double w_essential);

struct EnumerationLimits {
  std::size_t max_len = 10;
  std::size_t max_paths = 100000;
};

struct PathEnumeration {
  std::vector<Path> paths;
  /// Set when at least one root hit its share of max_paths.
  bool truncated = false;
};

/// All root-to-terminal paths with at most max_len messages, scored, ordered
/// by root then lexicographically. When a root has more paths than its share
/// of max_paths, its search follows edges in descending combined confidence
/// and stops at the quota. Throws EmptyModel when no path exists.
PathEnumeration enumerate_paths(const PrunedGraph& graph, const EssentialSet& essential,
                                const EnumerationLimits& limits, double w_essential = 1.0);

enum class SelectionStrategy {
  CoverageFirst,  // (uncovered count, length, essential edges)
  LengthFirst,    // (length, uncovered count, essential edges)
};

struct SelectionResult {
  FlowModel model;
  /// Graph nodes no candidate path could cover.
  std::set<MessageId> uncovered;
};

/// Greedy coverage: round-robin over roots, each round picking the best
/// candidate from that root that covers at least one uncovered node, until
/// every node is covered or a full round adds nothing.
SelectionResult select_base_model(const PrunedGraph& graph, const std::vector<Path>& candidates,
                                  SelectionStrategy strategy = SelectionStrategy::CoverageFirst);

struct RefineOptions {
  double accuracy = 0.9;
  EvaluationOptions evaluation;
};

struct RefineResult {
  FlowModel model;
  EvaluationResult evaluation;
  double initial_ratio = 0.0;
  std::size_t iterations = 0;
  std::size_t candidate_count = 0;
  bool below_threshold = false;
};

/// Iteratively drops model paths with unfired transitions and adds the best
/// scoring candidate that contains the most-unaccepted message. Returns the
/// highest-ratio model seen. `candidates` need not be sorted; paths already in
/// the model are ignored.
RefineResult refine(const FlowModel& model, const TraceSet& traces,
                    const std::vector<Path>& candidates,
                    const std::vector<EssentialFlow>& emfs, const RefineOptions& options);

struct MiningOptions {
  double accuracy = 0.9;
  double theta = 0.45;
  std::size_t max_len = 10;
  std::size_t max_paths = 100000;
  double w_essential = 1.0;
  bool emf = true;
  unsigned jobs = 1;
  std::size_t instance_cap = 10000;
  SelectionStrategy strategy = SelectionStrategy::CoverageFirst;
  ZeroSupportPolicy zero_support = ZeroSupportPolicy::ContributeZero;
};

struct MiningResult {
  CausalityGraph graph;
  PrunedGraph pruned;
  EssentialSet essential;
  /// Candidate paths whose every link is essential.
  std::vector<EssentialFlow> emfs;
  std::vector<Path> candidates;
  bool truncated = false;
  FlowModel base_model;
  EvaluationResult base_evaluation;
  FlowModel model;
  EvaluationResult evaluation;
  std::size_t iterations = 0;
  bool below_threshold = false;
  std::vector<std::string> warnings;
};

/// Graph construction, essential extraction, statistics, pruning, base-model
/// selection, evaluation, and refinement when the base model falls short.
MiningResult mine(const TraceSet& traces, const MessageDictionary& dict,
                  const MiningOptions& options = {});

}  // namespace flowmine
