#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string_view>
#include <vector>

#include "flowmine/mining.hpp"

namespace flowmine {

/// What a model file carries: the paths (with scores) and the acceptance
/// ratio the model reached when it was written.
struct ModelDocument {
  FlowModel model;
  double acceptance_ratio = 0.0;
};

/// Model export. Format:
///   flowmodel v1
///   size <n>
///   acceptance_ratio <r>
///   path <id,id,...> forward=<f> backward=<b> essential=<k> score=<s>
///     <id> <src:dest:cmd:type>        (one rendering line per message)
/// `dict` may be null, in which case the rendering lines are omitted.
void write_model(std::ostream& out, const FlowModel& model, double acceptance_ratio,
                 const MessageDictionary* dict);

/// Reads the format above; rendering lines are ignored.
ModelDocument parse_model(std::istream& in);
ModelDocument parse_model(std::string_view text);

/// One digraph per path.
void write_flows_dot(std::ostream& out, const FlowModel& model, const MessageDictionary& dict);

struct ModelDiff {
  std::vector<std::vector<MessageId>> only_a;
  std::vector<std::vector<MessageId>> only_b;
  double ratio_a = 0.0;
  double ratio_b = 0.0;
  /// Messages that occur in an A-only path and in no path of B.
  std::set<MessageId> implicated;
  /// A-only paths that use an implicated message: flows B cannot express at
  /// all, as opposed to A-only paths B merely selected differently.
  std::vector<std::vector<MessageId>> missing;
  /// For each message in an A-only path: how many A-only paths contain it.
  std::map<MessageId, std::size_t> missing_frequency;

  bool identical() const { return only_a.empty() && only_b.empty(); }
};

ModelDiff diff_models(const ModelDocument& a, const ModelDocument& b);
void write_diff(std::ostream& out, const ModelDiff& diff);

}  // namespace flowmine
