#pragma once

// Random flow libraries for closed-loop tests. Every flow draws its messages
// from a private id range, so no message is shared between flows and no
// flow path is a prefix of another flow's path.

#include <random>
#include <string>

#include "flowmine/synth.hpp"

namespace testlib {

inline flowmine::synth::FlowLibrary random_library(std::mt19937_64& rng, std::size_t flow_count) {
  using namespace flowmine;
  synth::FlowLibrary lib;
  std::uniform_int_distribution<int> size(2, 7);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t f = 0; f < flow_count; ++f) {
    synth::FlowSpec spec;
    spec.name = "f" + std::to_string(f);
    const MessageId base = static_cast<MessageId>(f * 100 + 1);
    const int n = size(rng);
    for (int i = 0; i < n; ++i) {
      auto id = base + static_cast<MessageId>(i);
      spec.nodes.insert(id);
      auto comp = "c" + std::to_string(f) + "_";
      lib.dict.add(Message{id, comp + std::to_string(i), comp + std::to_string(i + 1), "op",
                           MessageKind::Request});
    }
    spec.initial = base;
    // every node after the first gets at least one earlier predecessor
    for (int i = 1; i < n; ++i) {
      std::uniform_int_distribution<int> pred(0, i - 1);
      spec.edges.insert(Edge{base + static_cast<MessageId>(pred(rng)), base + static_cast<MessageId>(i)});
      for (int j = 0; j < i; ++j) {
        if (coin(rng) < 0.2) spec.edges.insert(Edge{base + static_cast<MessageId>(j), base + static_cast<MessageId>(i)});
      }
    }
    for (auto id : spec.nodes) {
      bool sink = true;
      for (auto e : spec.edges) sink = sink && e.head != id;
      if (sink) spec.terminals.insert(id);
    }
    lib.dict.mark_initial(spec.initial);
    for (auto t : spec.terminals) lib.dict.mark_terminal(t);
    spec.validate();
    lib.flows.push_back(std::move(spec));
  }
  return lib;
}

}  // namespace testlib
