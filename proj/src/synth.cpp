#include "flowmine/synth.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <random>
#include <sstream>

namespace flowmine::synth {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

MessageId parse_node(std::string_view token, std::size_t line) {
  token = trim(token);
  MessageId id = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error(ErrorKind::Parse, "bad message id `" + std::string(token) + "`", line);
  }
  return id;
}

void finish_flow(FlowSpec& flow, std::size_t line) {
  if (flow.nodes.empty()) throw Error(ErrorKind::Parse, "flow `" + flow.name + "` is empty", line);
  std::set<MessageId> has_in;
  std::set<MessageId> has_out;
  for (const auto& e : flow.edges) {
    has_out.insert(e.head);
    has_in.insert(e.tail);
  }
  std::vector<MessageId> sources;
  for (auto n : flow.nodes) {
    if (!has_in.count(n)) sources.push_back(n);
    if (!has_out.count(n)) flow.terminals.insert(n);
  }
  if (sources.size() != 1) {
    throw Error(ErrorKind::InvalidArgument,
                "flow `" + flow.name + "` must have exactly one source message", line);
  }
  flow.initial = sources.front();
  flow.validate();
}

}  // namespace

std::vector<std::vector<MessageId>> FlowSpec::paths() const {
  std::map<MessageId, std::vector<MessageId>> next;
  for (const auto& e : edges) next[e.head].push_back(e.tail);
  std::vector<std::vector<MessageId>> out;
  std::vector<MessageId> chain;
  auto walk = [&](auto&& self, MessageId node) -> void {
    chain.push_back(node);
    auto it = next.find(node);
    if (it == next.end()) {
      out.push_back(chain);
    } else {
      for (auto t : it->second) self(self, t);
    }
    chain.pop_back();
  };
  walk(walk, initial);
  std::sort(out.begin(), out.end());
  return out;
}

void FlowSpec::validate() const {
  CausalityGraph g;
  g.nodes = nodes;
  for (const auto& e : edges) {
    if (!nodes.count(e.head) || !nodes.count(e.tail)) {
      throw Error(ErrorKind::InvalidArgument, "flow `" + name + "` has an edge to an undeclared node");
    }
    g.edges.emplace(e, EdgeStats{});
  }
  if (!g.topological_order()) {
    throw Error(ErrorKind::InvalidArgument, "flow `" + name + "` is cyclic");
  }
  if (!nodes.count(initial)) {
    throw Error(ErrorKind::InvalidArgument, "flow `" + name + "` lacks its initial message");
  }
  for (auto n : nodes) {
    bool source = g.predecessors(n).empty();
    bool sink = g.successors(n).empty();
    if (source != (n == initial)) {
      throw Error(ErrorKind::InvalidArgument,
                  "flow `" + name + "` must be rooted at its initial message");
    }
    if (sink != (terminals.count(n) != 0)) {
      throw Error(ErrorKind::InvalidArgument,
                  "flow `" + name + "`: terminals must be exactly the sinks");
    }
  }
}

const FlowSpec& FlowLibrary::flow(std::string_view name) const {
  for (const auto& f : flows) {
    if (f.name == name) return f;
  }
  throw Error(ErrorKind::Reference, "unknown flow `" + std::string(name) + "`");
}

FlowLibrary parse_flow_library(std::istream& in) {
  FlowLibrary library;
  std::optional<FlowSpec> current;
  std::string raw;
  std::size_t line_no = 0;
  auto close = [&] {
    if (current) {
      finish_flow(*current, line_no);
      library.flows.push_back(std::move(*current));
      current.reset();
    }
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.substr(0, 5) == "flow " || line == "flow") {
      close();
      auto name = trim(line.substr(4));
      if (!is_valid_token(name)) throw Error(ErrorKind::Parse, "bad flow name", line_no);
      for (const auto& f : library.flows) {
        if (f.name == name) throw Error(ErrorKind::Duplicate, "flow `" + std::string(name) + "` declared twice", line_no);
      }
      current = FlowSpec{};
      current->name = std::string(name);
      continue;
    }
    if (!current) throw Error(ErrorKind::Parse, "content before the first `flow` line", line_no);
    if (auto arrow = line.find("->"); arrow != std::string_view::npos) {
      auto head = parse_node(line.substr(0, arrow), line_no);
      auto tail = parse_node(line.substr(arrow + 2), line_no);
      for (auto id : {head, tail}) {
        if (!library.dict.contains(id)) {
          throw Error(ErrorKind::Reference, "message id " + std::to_string(id) + " is not declared",
                      line_no);
        }
        current->nodes.insert(id);
      }
      current->edges.insert(Edge{head, tail});
      continue;
    }
    auto message = parse_message_line(line, line_no);
    if (library.dict.contains(message.id)) {
      if (!(library.dict.at(message.id) == message)) {
        throw Error(ErrorKind::Duplicate,
                    "message id " + std::to_string(message.id) + " redeclared differently", line_no);
      }
    } else {
      try {
        library.dict.add(message);
      } catch (const Error& e) {
        throw Error(e.kind(), e.what(), line_no);
      }
    }
    current->nodes.insert(message.id);
  }
  close();
  if (library.flows.empty()) throw Error(ErrorKind::EmptyModel, "no flows declared");

  std::set<MessageId> interior;
  for (const auto& f : library.flows) {
    library.dict.mark_initial(f.initial);
    for (auto t : f.terminals) library.dict.mark_terminal(t);
    for (auto n : f.nodes) {
      if (n != f.initial && !f.terminals.count(n)) interior.insert(n);
    }
  }
  for (auto n : interior) {
    if (library.dict.is_initial(n) || library.dict.is_terminal(n)) {
      throw Error(ErrorKind::InvalidDictionary,
                  "message " + std::to_string(n) + " is interior in one flow but an endpoint in another");
    }
  }
  library.dict.validate();
  return library;
}

FlowLibrary parse_flow_library(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_flow_library(in);
}

void write_flow_library(std::ostream& out, const FlowLibrary& library) {
  bool first = true;
  for (const auto& f : library.flows) {
    if (!first) out << '\n';
    first = false;
    out << "flow " << f.name << '\n';
    for (auto n : f.nodes) out << n << " (" << library.dict.at(n).quadruple() << ")\n";
    for (const auto& e : f.edges) out << e.head << " -> " << e.tail << '\n';
  }
}

void GenerationConfig::validate() const {
  if (instances_per_flow < 1) {
    throw Error(ErrorKind::InvalidArgument, "instances per flow must be at least 1");
  }
  if (max_concurrent < 1) {
    throw Error(ErrorKind::InvalidArgument, "max concurrent executions must be at least 1");
  }
  if (trace_count < 1) throw Error(ErrorKind::InvalidArgument, "trace count must be at least 1");
  if (drop && !(drop->probability >= 0.0 && drop->probability <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "drop probability must lie in [0,1]");
  }
}

GenerationResult generate(const FlowLibrary& library, const GenerationConfig& config) {
  config.validate();

  std::vector<const FlowSpec*> chosen;
  if (config.flows.empty()) {
    for (const auto& f : library.flows) chosen.push_back(&f);
  } else {
    for (const auto& name : config.flows) chosen.push_back(&library.flow(name));
  }
  for (const auto& [name, count] : config.instance_overrides) library.flow(name);

  GenerationResult result;
  std::vector<std::vector<std::vector<MessageId>>> flow_paths;
  for (const auto* f : chosen) {
    for (auto n : f->nodes) {
      if (!result.dict.contains(n)) result.dict.add(library.dict.at(n));
    }
    result.dict.mark_initial(f->initial);
    for (auto t : f->terminals) result.dict.mark_terminal(t);
    flow_paths.push_back(f->paths());
    for (const auto& p : flow_paths.back()) result.ground_truth.add(Path{p});
  }

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> executions;
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    auto it = config.instance_overrides.find(chosen[k]->name);
    auto count = it == config.instance_overrides.end() ? config.instances_per_flow : it->second;
    executions.insert(executions.end(), count, k);
  }

  struct Live {
    const std::vector<MessageId>* path;
    std::size_t next;
  };
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t t = 0; t < config.trace_count; ++t) {
    auto order = executions;
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t admitted = 0;
    std::vector<Live> live;
    Trace trace;
    while (admitted < order.size() || !live.empty()) {
      while (live.size() < config.max_concurrent && admitted < order.size()) {
        const auto& paths = flow_paths[order[admitted++]];
        std::uniform_int_distribution<std::size_t> pick(0, paths.size() - 1);
        live.push_back(Live{&paths[pick(rng)], 0});
      }
      std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
      auto k = pick(rng);
      auto& exec = live[k];
      auto id = (*exec.path)[exec.next++];
      // p = 0 and p = 1 draw nothing, so they leave the schedule untouched
      bool dropped = false;
      if (config.drop && config.drop->id == id) {
        const double p = config.drop->probability;
        dropped = p >= 1.0 || (p > 0.0 && coin(rng) < p);
      }
      if (!dropped) trace.events.push_back(id);
      if (exec.next == exec.path->size()) live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
    }
    result.traces.traces.push_back(std::move(trace));
  }
  return result;
}

double project_ground_truth_ar(const TraceSet& traces, const FlowModel& ground_truth) {
  if (traces.empty()) throw Error(ErrorKind::EmptyModel, "empty trace set");
  return evaluate(traces, ground_truth).acceptance_ratio;
}

std::vector<std::string> preset_names() { return {"small-20", "large-10", "large-20"}; }

Preset preset(std::string_view name, std::uint64_t seed) {
  Preset p;
  p.name = std::string(name);
  p.config.seed = seed;
  p.config.max_concurrent = 4;
  if (name == "small-20") {
    p.config.flows = {"cpu0_read", "cpu0_write", "cpu1_read", "cpu1_write"};
    p.config.instances_per_flow = 20;
    p.config.trace_count = 10;
  } else if (name == "large-10") {
    p.config.instances_per_flow = 10;
    p.config.trace_count = 10;
  } else if (name == "large-20") {
    p.config.instances_per_flow = 20;
    p.config.trace_count = 13;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown preset `" + std::string(name) + "`");
  }
  return p;
}

}  // namespace flowmine::synth
