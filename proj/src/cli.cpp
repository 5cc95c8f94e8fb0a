#include "flowmine/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "flowmine/model_io.hpp"
#include "flowmine/synth.hpp"

namespace flowmine::cli {

namespace fs = std::filesystem;

RunReport make_report(const TraceSet& traces, const MiningResult& result, double runtime_seconds) {
  RunReport r;
  r.trace_count = traces.size();
  r.message_count = traces.total_messages();
  r.model_size = result.model.size();
  r.acceptance_ratio = result.evaluation.acceptance_ratio;
  r.base_acceptance_ratio = result.base_evaluation.acceptance_ratio;
  r.runtime_seconds = runtime_seconds;
  r.iterations = result.iterations;
  r.candidate_count = result.candidates.size();
  r.below_threshold = result.below_threshold;
  r.length_histogram = result.evaluation.completed_by_length;
  return r;
}

void write_report(std::ostream& out, const RunReport& r) {
  auto flags = out.flags();
  auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  out << "flowmine report v1\n";
  out << "traces " << r.trace_count << '\n';
  out << "messages " << r.message_count << '\n';
  out << "model_size " << r.model_size << '\n';
  out << "acceptance_ratio " << r.acceptance_ratio << '\n';
  out << "base_acceptance_ratio " << r.base_acceptance_ratio << '\n';
  out << "iterations " << r.iterations << '\n';
  out << "candidates " << r.candidate_count << '\n';
  out << "below_threshold " << (r.below_threshold ? "yes" : "no") << '\n';
  out << "length_histogram\n";
  for (const auto& [len, n] : r.length_histogram) out << "  " << len << ' ' << n << '\n';
  out.flags(flags);
  out.precision(precision);
}

void write_report_json(std::ostream& out, const RunReport& r) {
  nlohmann::ordered_json j;
  j["traces"] = r.trace_count;
  j["messages"] = r.message_count;
  j["model_size"] = r.model_size;
  j["acceptance_ratio"] = r.acceptance_ratio;
  j["base_acceptance_ratio"] = r.base_acceptance_ratio;
  j["iterations"] = r.iterations;
  j["candidates"] = r.candidate_count;
  j["below_threshold"] = r.below_threshold;
  auto& hist = j["length_histogram"] = nlohmann::ordered_json::object();
  for (const auto& [len, n] : r.length_histogram) hist[std::to_string(len)] = n;
  out << j.dump(2) << '\n';
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open `" + path + "`");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write `" + path.string() + "`");
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create `" + dir + "`: " + ec.message());
}

struct MineArgs {
  std::string defs;
  std::vector<std::string> traces;
  MiningOptions options;
  std::string emf = "on";
  std::string strategy = "coverage";
  std::string zero_support = "zero";
  std::string out_dir = "flowmine-out";
  bool dot = false;
  bool json_report = false;
};

int do_mine(const MineArgs& args, std::ostream& out, std::ostream& err) {
  auto started = std::chrono::steady_clock::now();
  auto defs_in = open_input(args.defs);
  auto dict = parse_message_definitions(defs_in);
  TraceSet traces;
  for (const auto& path : args.traces) {
    auto in = open_input(path);
    try {
      auto part = parse_traces(in, dict);
      for (auto& t : part.traces) traces.traces.push_back(std::move(t));
    } catch (const Error& e) {
      throw Error(e.kind(), path + ": " + e.what());
    }
  }
  if (traces.empty()) throw Error(ErrorKind::EmptyModel, "trace files contain no traces");

  auto options = args.options;
  options.emf = args.emf == "on";
  options.strategy = args.strategy == "length" ? SelectionStrategy::LengthFirst
                                               : SelectionStrategy::CoverageFirst;
  options.zero_support = args.zero_support == "skip" ? ZeroSupportPolicy::SkipTrace
                                                     : ZeroSupportPolicy::ContributeZero;
  auto result = mine(traces, dict, options);
  double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  ensure_dir(args.out_dir);
  fs::path dir(args.out_dir);
  {
    auto f = open_output(dir / "model.txt");
    write_model(f, result.model, result.evaluation.acceptance_ratio, &dict);
  }
  {
    auto f = open_output(dir / "essential.txt");
    write_essential(f, result.essential);
  }
  auto report = make_report(traces, result, runtime);
  {
    auto f = open_output(dir / "report.txt");
    write_report(f, report);
  }
  if (args.json_report) {
    auto f = open_output(dir / "report.json");
    write_report_json(f, report);
  }
  if (args.dot) {
    auto g = open_output(dir / "causality.dot");
    write_dot(g, result.graph, dict, result.essential.pairs);
    auto p = open_output(dir / "pruned.dot");
    write_dot(p, result.pruned.graph, dict, result.pruned.essential_edges);
    auto f = open_output(dir / "flows.dot");
    write_flows_dot(f, result.model, dict);
  }

  out << std::fixed << std::setprecision(4);
  out << "model size " << report.model_size << ", acceptance ratio " << report.acceptance_ratio
      << " (base " << report.base_acceptance_ratio << "), " << report.iterations
      << " refinement iteration(s), " << std::setprecision(2) << runtime << " s\n";
  if (result.evaluation.acceptance_ratio < options.accuracy) {
    err << "acceptance ratio below the requested accuracy " << options.accuracy << '\n';
    return kBelowThreshold;
  }
  return kOk;
}

struct GenerateArgs {
  std::string preset;
  std::string flows;
  std::size_t instances = 1;
  std::size_t trace_count = 1;
  std::size_t max_concurrent = 4;
  std::uint64_t seed = 0;
  std::string drop;
  std::string out_dir = "flowmine-traces";
};

synth::DropRule parse_drop(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, "--drop expects ID:PROB");
  }
  synth::DropRule rule;
  try {
    std::size_t used = 0;
    auto id = std::stoul(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("id");
    rule.id = static_cast<MessageId>(id);
    auto prob = text.substr(colon + 1);
    rule.probability = std::stod(prob, &used);
    if (used != prob.size()) throw std::invalid_argument("prob");
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "--drop expects ID:PROB, got `" + text + "`");
  }
  return rule;
}

int do_generate(const GenerateArgs& args, const CLI::App& sub, std::ostream& out) {
  synth::FlowLibrary custom;
  const synth::FlowLibrary* library = &synth::fixture_library();
  synth::GenerationConfig config;
  if (!args.preset.empty()) {
    config = synth::preset(args.preset, args.seed).config;
    if (sub.count("--instances")) config.instances_per_flow = args.instances;
    if (sub.count("--trace-count")) config.trace_count = args.trace_count;
    if (sub.count("--max-concurrent")) config.max_concurrent = args.max_concurrent;
  } else {
    auto in = open_input(args.flows);
    custom = synth::parse_flow_library(in);
    library = &custom;
    config.instances_per_flow = args.instances;
    config.trace_count = args.trace_count;
    config.max_concurrent = args.max_concurrent;
    config.seed = args.seed;
  }
  if (!args.drop.empty()) config.drop = parse_drop(args.drop);

  auto result = synth::generate(*library, config);
  ensure_dir(args.out_dir);
  fs::path dir(args.out_dir);
  {
    auto f = open_output(dir / "defs.txt");
    write_message_definitions(f, result.dict);
  }
  {
    auto f = open_output(dir / "traces.txt");
    write_traces(f, result.traces);
  }
  {
    // evaluated, not assumed: shared messages can make oldest-first dispatch
    // misroute even the true flows
    auto f = open_output(dir / "ground_truth.txt");
    write_model(f, result.ground_truth,
                result.traces.empty() ? 0.0
                                      : synth::project_ground_truth_ar(result.traces,
                                                                       result.ground_truth),
                &result.dict);
  }
  {
    auto f = open_output(dir / "flows.txt");
    synth::FlowLibrary used{result.dict, {}};
    for (const auto& f2 : library->flows) {
      if (config.flows.empty() ||
          std::find(config.flows.begin(), config.flows.end(), f2.name) != config.flows.end()) {
        used.flows.push_back(f2);
      }
    }
    synth::write_flow_library(f, used);
  }
  out << "wrote " << result.traces.size() << " trace(s), " << result.traces.total_messages()
      << " messages, " << result.ground_truth.size() << " ground-truth path(s) to "
      << args.out_dir << '\n';
  return kOk;
}

int do_diff(const std::string& a_path, const std::string& b_path, std::ostream& out) {
  auto a_in = open_input(a_path);
  auto b_in = open_input(b_path);
  ModelDocument a;
  ModelDocument b;
  try {
    a = parse_model(a_in);
  } catch (const Error& e) {
    throw Error(e.kind(), a_path + ": " + e.what());
  }
  try {
    b = parse_model(b_in);
  } catch (const Error& e) {
    throw Error(e.kind(), b_path + ": " + e.what());
  }
  write_diff(out, diff_models(a, b));
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mine message-flow specifications from communication traces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "flowmine 0.1.0");

  MineArgs mine_args;
  auto* mine_cmd = app.add_subcommand("mine", "mine a flow model from traces");
  mine_cmd->add_option("--defs", mine_args.defs, "message definition file")->required();
  mine_cmd->add_option("--traces", mine_args.traces, "trace file(s)")->required();
  mine_cmd->add_option("--accuracy", mine_args.options.accuracy, "acceptance-ratio target")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  mine_cmd->add_option("--theta", mine_args.options.theta, "pruning threshold")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  mine_cmd->add_option("--max-len", mine_args.options.max_len, "longest path, in messages")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}))->capture_default_str();
  mine_cmd->add_option("--max-paths", mine_args.options.max_paths, "path enumeration cap")
      ->check(CLI::PositiveNumber)->capture_default_str();
  mine_cmd->add_option("--w-essential", mine_args.options.w_essential,
                       "weight of essential links in path scores")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  mine_cmd->add_option("--emf", mine_args.emf, "strip essential flows before evaluation")
      ->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  mine_cmd->add_option("--jobs", mine_args.options.jobs, "evaluation worker threads")
      ->check(CLI::Range(1u, 1024u))->capture_default_str();
  mine_cmd->add_option("--strategy", mine_args.strategy, "base-model selection order")
      ->check(CLI::IsMember({"coverage", "length"}))->capture_default_str();
  mine_cmd->add_option("--zero-support", mine_args.zero_support,
                       "confidence contribution of traces lacking an endpoint")
      ->check(CLI::IsMember({"zero", "skip"}))->capture_default_str();
  mine_cmd->add_option("--out", mine_args.out_dir, "output directory")->capture_default_str();
  mine_cmd->add_flag("--dot", mine_args.dot, "also write Graphviz files");
  mine_cmd->add_flag("--json-report", mine_args.json_report, "also write report.json");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "generate synthetic traces");
  auto* preset_opt = gen_cmd->add_option("--preset", gen_args.preset, "built-in workload")
                         ->check(CLI::IsMember(synth::preset_names()));
  auto* flows_opt = gen_cmd->add_option("--flows", gen_args.flows, "flow library file");
  preset_opt->excludes(flows_opt);
  gen_cmd->add_option("--instances", gen_args.instances, "executions per flow and trace")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--trace-count", gen_args.trace_count, "number of traces")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--max-concurrent", gen_args.max_concurrent, "live executions bound")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_args.seed, "scheduler seed")->capture_default_str();
  gen_cmd->add_option("--drop", gen_args.drop, "drop message ID with probability PROB (ID:PROB)");
  gen_cmd->add_option("--out", gen_args.out_dir, "output directory")->capture_default_str();

  std::string diff_a;
  std::string diff_b;
  auto* diff_cmd = app.add_subcommand("diff", "compare two model files");
  diff_cmd->add_option("a", diff_a, "reference model (e.g. healthy run)")->required();
  diff_cmd->add_option("b", diff_b, "other model (e.g. faulty run)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "flowmine 0.1.0\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }

  try {
    if (*mine_cmd) return do_mine(mine_args, out, err);
    if (*gen_cmd) {
      if (gen_args.preset.empty() && gen_args.flows.empty()) {
        err << "error: generate needs --preset or --flows\n";
        return kFailure;
      }
      return do_generate(gen_args, *gen_cmd, out);
    }
    if (*diff_cmd) return do_diff(diff_a, diff_b, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace flowmine::cli
