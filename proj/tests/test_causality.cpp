#include <doctest.h>

#include <random>
#include <sstream>

#include "flowmine/causality.hpp"
#include "oracles.hpp"

using namespace flowmine;

namespace {

TraceSet worked_set() { return TraceSet{{Trace{oracle::worked_trace()}}}; }

CausalityGraph worked_graph() {
  auto dict = oracle::fig2_dictionary();
  auto g = construct_causality_graph(worked_set(), dict);
  aggregate_statistics(worked_set(), g);
  return g;
}

}  // namespace

TEST_CASE("construct_causality_graph on the worked trace") {
  auto g = worked_graph();
  CHECK(g.nodes == std::set<MessageId>{1, 2, 3, 4, 5, 6});
  CHECK(g.roots == std::set<MessageId>{1, 3});
  CHECK(g.terminals == std::set<MessageId>{2, 4});
  std::set<Edge> expected{{1, 2}, {1, 5}, {5, 6}, {6, 2}, {3, 4}, {3, 5}, {6, 4}, {1, 4}, {3, 2}};
  std::set<Edge> got;
  for (auto& [e, s] : g.edges) got.insert(e);
  CHECK(got == expected);
}

TEST_CASE("construct_causality_graph trivial inputs") {
  auto dict = oracle::fig2_dictionary();
  auto g = construct_causality_graph(TraceSet{{Trace{{1, 2}}}}, dict);
  CHECK(g.nodes == std::set<MessageId>{1, 2});
  REQUIRE(g.edges.size() == 1);
  CHECK(g.has_edge(1, 2));

  try {
    construct_causality_graph(TraceSet{{Trace{{5, 6, 2}}}}, dict);
    FAIL("expected empty-model error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyModel);
  }
}

TEST_CASE("construct_causality_graph omits cycle-closing edges") {
  // a->b, b->a are both structurally causal; only one direction survives.
  auto dict = parse_message_definitions(
      "1 (cpu:a:go:req)\n2 (a:b:x:req)\n3 (b:a:y:req)\n4 (a:cpu:go:resp)\n"
      "initial = {1}\nterminal = {4}\n");
  auto g = construct_causality_graph(TraceSet{{Trace{{1, 2, 3, 2, 4}}}}, dict);
  CHECK(g.has_edge(2, 3));
  CHECK_FALSE(g.has_edge(3, 2));
  CHECK(g.topological_order().has_value());
}

TEST_CASE("node_support") {
  Trace t{oracle::worked_trace()};
  CHECK(node_support(t, 1) == 3);
  CHECK(node_support(t, 5) == 2);
  CHECK(node_support(Trace{}, 1) == 0);
}

TEST_CASE("edge_support on the worked trace") {
  Trace t{oracle::worked_trace()};
  CHECK(edge_support(t, 1, 2) == 3);
  CHECK(edge_support(t, 3, 2) == 1);
  CHECK(edge_support(Trace{{2, 1}}, 1, 2) == 0);
  // frozen oracle values for every graph edge
  CHECK(oracle::max_precedence_matching(t.events, 1, 2) == 3);
  CHECK(oracle::max_precedence_matching(t.events, 3, 2) == 1);
  CHECK(oracle::max_precedence_matching(t.events, 1, 4) == 1);
  CHECK(oracle::max_precedence_matching(t.events, 3, 5) == 1);
  CHECK(oracle::max_precedence_matching(t.events, 6, 4) == 1);
}

TEST_CASE("edge_support agrees with the maximum-matching oracle") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    Trace t{oracle::random_events(rng, 20, 4)};
    for (MessageId h = 1; h <= 4; ++h) {
      for (MessageId tl = 1; tl <= 4; ++tl) {
        if (h == tl) continue;
        REQUIRE(edge_support(t, h, tl) == oracle::max_precedence_matching(t.events, h, tl));
      }
    }
  }
}

TEST_CASE("confidences") {
  Trace t{oracle::worked_trace()};
  CHECK(forward_confidence(t, 1, 2) == doctest::Approx(1.0));
  CHECK(forward_confidence(t, 1, 4) == doctest::Approx(1.0 / 3.0));
  CHECK(backward_confidence(t, 1, 2) == doctest::Approx(1.0));
  CHECK(backward_confidence(t, 3, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(forward_confidence(Trace{{2, 1}}, 1, 2) == 0.0);
  CHECK(backward_confidence(Trace{{2, 1}}, 1, 2) == 0.0);
  CHECK(forward_confidence(Trace{{2}}, 1, 2) == 0.0);
}

TEST_CASE("aggregate_statistics") {
  auto dict = oracle::fig2_dictionary();
  auto one = worked_graph();
  TraceSet twice{{Trace{oracle::worked_trace()}, Trace{oracle::worked_trace()}}};
  auto two = construct_causality_graph(twice, dict);
  aggregate_statistics(twice, two);
  for (auto& [e, s] : one.edges) {
    CHECK(two.stats(e.head, e.tail).forward == doctest::Approx(s.forward));
    CHECK(two.stats(e.head, e.tail).backward == doctest::Approx(s.backward));
    CHECK(two.stats(e.head, e.tail).support == 2 * s.support);
  }

  TraceSet mixed{{Trace{{1, 2}}, Trace{{1, 1, 2}}}};
  auto g = construct_causality_graph(mixed, dict);
  aggregate_statistics(mixed, g);
  CHECK(g.stats(1, 2).forward == doctest::Approx(0.75));
  CHECK(g.stats(1, 2).backward == doctest::Approx(1.0));
}

TEST_CASE("zero-support policy is switchable") {
  auto dict = oracle::fig2_dictionary();
  TraceSet set{{Trace{{1, 2}}, Trace{{3, 4}}}};
  auto g = construct_causality_graph(set, dict);
  aggregate_statistics(set, g, ZeroSupportPolicy::ContributeZero);
  CHECK(g.stats(1, 2).forward == doctest::Approx(0.5));
  aggregate_statistics(set, g, ZeroSupportPolicy::SkipTrace);
  CHECK(g.stats(1, 2).forward == doctest::Approx(1.0));
}

TEST_CASE("prune on the worked graph") {
  auto g = worked_graph();
  CHECK(g.stats(1, 4).combined() == doctest::Approx(5.0 / 12.0));
  CHECK(g.stats(3, 2).combined() == doctest::Approx(5.0 / 12.0));
  CHECK(g.stats(3, 5).combined() == doctest::Approx(0.5));
  CHECK(g.stats(6, 4).combined() == doctest::Approx(0.5));

  auto p = prune(g, 0.45, {});
  std::set<Edge> removed;
  for (auto& [e, s] : g.edges) {
    if (!p.graph.edges.count(e)) removed.insert(e);
  }
  CHECK(removed == std::set<Edge>{{1, 4}, {3, 2}});
  CHECK(p.graph.has_edge(3, 5));
  CHECK(p.graph.has_edge(6, 4));

  CHECK(prune(g, 0.0, {}).graph.edges.size() == g.edges.size());

  auto kept = prune(g, 1.0, {Edge{1, 4}, Edge{1, 2}});
  CHECK(kept.graph.has_edge(1, 4));
  CHECK(kept.essential_edges.count(Edge{1, 4}));

  CHECK_THROWS_AS(prune(g, 1.5, {}), Error);
}

TEST_CASE("prune reports over-pruning") {
  auto dict = oracle::fig2_dictionary();
  TraceSet set{{Trace{{1, 1, 1, 1, 2}}}};
  auto g = construct_causality_graph(set, dict);
  aggregate_statistics(set, g);
  try {
    prune(g, 0.99, {});
    FAIL("expected over-pruned error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OverPruned);
  }
}

TEST_CASE("graph invariants on random traces") {
  auto dict = oracle::fig2_dictionary();
  std::mt19937_64 rng(7);
  for (int round = 0; round < 300; ++round) {
    TraceSet set;
    std::uniform_int_distribution<int> n(1, 3);
    for (int k = n(rng); k > 0; --k) {
      auto events = oracle::random_events(rng, 20, 6);
      events.insert(events.begin(), 1 + 2 * (round % 2));
      set.traces.push_back(Trace{events});
    }
    auto g = construct_causality_graph(set, dict);
    aggregate_statistics(set, g);
    REQUIRE(g.topological_order().has_value());
    for (auto& [e, s] : g.edges) {
      CHECK(causal(dict.at(e.head), dict.at(e.tail)));
      CHECK(s.forward >= 0.0);
      CHECK(s.forward <= 1.0);
      CHECK(s.backward >= 0.0);
      CHECK(s.backward <= 1.0);
      for (auto& t : set.traces) {
        CHECK(edge_support(t, e.head, e.tail) <=
              std::min(node_support(t, e.head), node_support(t, e.tail)));
      }
    }
    // monotone pruning
    std::set<Edge> previous;
    bool first = true;
    for (double theta : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      std::set<Edge> now;
      try {
        for (auto& [e, s] : prune(g, theta, {}).graph.edges) now.insert(e);
      } catch (const Error&) {
        // over-pruned: empty edge set
      }
      if (!first) {
        CHECK(std::includes(previous.begin(), previous.end(), now.begin(), now.end()));
      }
      previous = now;
      first = false;
    }
  }
}

TEST_CASE("write_dot labels") {
  auto g = worked_graph();
  std::ostringstream out;
  write_dot(out, g, oracle::fig2_dictionary(), {Edge{3, 4}});
  auto text = out.str();
  CHECK(text.find("digraph") == 0);
  CHECK(text.find("1: cpu0:cache:rd:req") != std::string::npos);
  CHECK(text.find("f=1.000, b=1.000, s=3") != std::string::npos);
  CHECK(text.find("f=0.333, b=0.500, s=1") != std::string::npos);
}
