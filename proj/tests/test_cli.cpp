#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "flowmine/cli.hpp"
#include "flowmine/model_io.hpp"
#include "oracles.hpp"

using namespace flowmine;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("flowmine-test-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "flowmine");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

void write_worked_inputs(const fs::path& dir) {
  std::ostringstream defs;
  write_message_definitions(defs, oracle::fig2_dictionary());
  spit(dir / "defs.txt", defs.str());
  spit(dir / "t.txt", "3 4 1 1 5 6 2 5 6 2 1 2 3 4\n");
}

FlowModel model_of(std::initializer_list<std::vector<MessageId>> seqs) {
  FlowModel m;
  for (auto& s : seqs) {
    Path p{s};
    p.forward_score = 0.5;
    p.backward_score = 0.25;
    p.essential_count = 1;
    p.score = 0.125;
    m.add(p);
  }
  return m;
}

}  // namespace

TEST_CASE("model files round-trip") {
  auto m = model_of({{1, 5, 6, 2}, {3, 4}});
  std::ostringstream out;
  auto dict = oracle::fig2_dictionary();
  write_model(out, m, 0.928571, &dict);
  CHECK(out.str().find("path 1,5,6,2 forward=0.500000 backward=0.250000 essential=1 score=0.125000") !=
        std::string::npos);
  CHECK(out.str().find("  5 cache:mem:rd:req") != std::string::npos);
  auto doc = parse_model(out.str());
  CHECK(doc.acceptance_ratio == doctest::Approx(0.928571));
  REQUIRE(doc.model.size() == 2);
  CHECK(doc.model.paths()[0].sequence == std::vector<MessageId>{1, 5, 6, 2});
  CHECK(doc.model.paths()[1].score == doctest::Approx(0.125));
  CHECK_THROWS_AS(parse_model("not a model\n"), Error);
  CHECK_THROWS_AS(parse_model("flowmodel v1\nsize 2\nacceptance_ratio 1\npath 1,2 forward=0 "
                              "backward=0 essential=0 score=0\n"),
                  Error);
}

TEST_CASE("diff_models") {
  ModelDocument a{model_of({{1, 2}, {1, 5, 6, 2}}), 0.95};
  auto same = diff_models(a, a);
  CHECK(same.identical());

  ModelDocument b{model_of({{1, 2}, {3, 4}}), 0.8};
  auto d = diff_models(a, b);
  CHECK(d.only_a == std::vector<std::vector<MessageId>>{{1, 5, 6, 2}});
  CHECK(d.only_b == std::vector<std::vector<MessageId>>{{3, 4}});
  CHECK(d.implicated == std::set<MessageId>{5, 6});
  CHECK(d.missing == d.only_a);
  std::ostringstream out;
  write_diff(out, d);
  CHECK(out.str().find("only_in_a 1") != std::string::npos);
  CHECK(out.str().find("  - 1,5,6,2") != std::string::npos);

  ModelDocument c{model_of({{3, 4}}), 0.5};
  ModelDocument e{model_of({{1, 2}}), 0.5};
  auto disjoint = diff_models(c, e);
  CHECK(disjoint.only_a.size() == 1);
  CHECK(disjoint.only_b.size() == 1);
}

TEST_CASE("cli mine on the worked example") {
  TempDir tmp;
  write_worked_inputs(tmp.path);
  auto out = tmp.path / "out";
  CHECK(run({"mine", "--defs", (tmp.path / "defs.txt").string(), "--traces",
             (tmp.path / "t.txt").string(), "--accuracy", "0.9", "--theta", "0.45", "--out",
             out.string(), "--dot", "--json-report"}) == cli::kOk);
  for (auto name : {"model.txt", "essential.txt", "report.txt", "report.json", "causality.dot",
                    "pruned.dot", "flows.dot"}) {
    CHECK(fs::exists(out / name));
  }
  auto doc = parse_model(slurp(out / "model.txt"));
  CHECK(doc.acceptance_ratio >= 0.9);

  // identical flags: byte-identical artifacts
  auto again = tmp.path / "again";
  run({"mine", "--defs", (tmp.path / "defs.txt").string(), "--traces",
       (tmp.path / "t.txt").string(), "--out", again.string()});
  CHECK(slurp(out / "model.txt") == slurp(again / "model.txt"));
  CHECK(slurp(out / "report.txt") == slurp(again / "report.txt"));

  // the essential-flow shortcut never lowers the ratio or grows the model
  auto off = tmp.path / "off";
  run({"mine", "--defs", (tmp.path / "defs.txt").string(), "--traces",
       (tmp.path / "t.txt").string(), "--out", off.string(), "--emf", "off"});
  auto doc_off = parse_model(slurp(off / "model.txt"));
  CHECK(doc_off.acceptance_ratio <= doc.acceptance_ratio);
  for (const auto& p : doc.model.paths()) CHECK(doc_off.model.contains(p.sequence));
}

TEST_CASE("cli exit codes") {
  TempDir tmp;
  write_worked_inputs(tmp.path);
  auto defs = (tmp.path / "defs.txt").string();
  auto traces = (tmp.path / "t.txt").string();
  auto out = (tmp.path / "o").string();
  CHECK(run({"mine", "--defs", defs, "--traces", traces, "--accuracy", "1.01", "--out", out}) ==
        cli::kFailure);
  CHECK(run({"mine", "--defs", defs, "--traces", (tmp.path / "missing.txt").string(), "--out",
             out}) == cli::kFailure);
  // 5 never reaches a terminal, so no model can accept it
  spit(tmp.path / "orphan.txt", "1 2 5\n");
  CHECK(run({"mine", "--defs", defs, "--traces", (tmp.path / "orphan.txt").string(), "--out",
             out}) == cli::kBelowThreshold);
  spit(tmp.path / "bad.txt", "1 2 99\n");
  CHECK(run({"mine", "--defs", defs, "--traces", (tmp.path / "bad.txt").string(), "--out", out}) ==
        cli::kFailure);
  CHECK(run({"frobnicate"}) == cli::kFailure);
  CHECK(run({"diff", (tmp.path / "nope").string(), defs}) == cli::kFailure);
  std::string help;
  CHECK(run({"--help"}, &help) == cli::kOk);
  CHECK(help.find("mine") != std::string::npos);
}

TEST_CASE("cli generate") {
  TempDir tmp;
  auto a = tmp.path / "a";
  auto b = tmp.path / "b";
  CHECK(run({"generate", "--preset", "small-20", "--seed", "7", "--out", a.string()}) == cli::kOk);
  CHECK(run({"generate", "--preset", "small-20", "--seed", "7", "--out", b.string()}) == cli::kOk);
  for (auto name : {"defs.txt", "traces.txt", "ground_truth.txt", "flows.txt"}) {
    CHECK(slurp(a / name) == slurp(b / name));
  }
  auto dict = parse_message_definitions(slurp(a / "defs.txt"));
  auto traces = parse_traces(slurp(a / "traces.txt"), dict);
  CHECK(traces.total_messages() > 0);

  auto d = tmp.path / "d";
  CHECK(run({"generate", "--flows", (a / "flows.txt").string(), "--instances", "2", "--drop",
             "5:1.0", "--out", d.string()}) == cli::kOk);
  CHECK(slurp(d / "traces.txt").find(" 5 ") == std::string::npos);
  auto dropped = parse_traces(slurp(d / "traces.txt"), parse_message_definitions(slurp(d / "defs.txt")));
  for (auto& t : dropped.traces) {
    for (auto m : t.events) CHECK(m != 5);
  }

  CHECK(run({"generate", "--preset", "small-20", "--flows", "x", "--out", d.string()}) ==
        cli::kFailure);
  CHECK(run({"generate", "--preset", "huge", "--out", d.string()}) == cli::kFailure);
  CHECK(run({"generate", "--preset", "small-20", "--drop", "5", "--out", d.string()}) ==
        cli::kFailure);
}

TEST_CASE("cli diff") {
  TempDir tmp;
  auto dict = oracle::fig2_dictionary();
  auto write = [&](const fs::path& p, const FlowModel& m) {
    std::ofstream f(p);
    write_model(f, m, 0.9, &dict);
  };
  write(tmp.path / "a.txt", model_of({{1, 2}, {1, 5, 6, 2}}));
  write(tmp.path / "b.txt", model_of({{1, 2}}));
  std::string text;
  CHECK(run({"diff", (tmp.path / "a.txt").string(), (tmp.path / "a.txt").string()}, &text) ==
        cli::kOk);
  CHECK(text.find("only_in_a 0") != std::string::npos);
  CHECK(run({"diff", (tmp.path / "a.txt").string(), (tmp.path / "b.txt").string()}, &text) ==
        cli::kOk);
  CHECK(text.find("  - 1,5,6,2") != std::string::npos);
  CHECK(text.find("implicated 5,6") != std::string::npos);
}

TEST_CASE("diff separates missing flows from reselected ones") {
  ModelDocument a{model_of({{1, 2}, {1, 5, 6, 2}, {3, 4}}), 0.95};
  ModelDocument b{model_of({{1, 2}, {3, 6, 4}}), 0.9};
  auto d = diff_models(a, b);
  CHECK(d.only_a.size() == 2);
  CHECK(d.implicated == std::set<MessageId>{5});
  CHECK(d.missing == std::vector<std::vector<MessageId>>{{1, 5, 6, 2}});
  std::ostringstream out;
  write_diff(out, d);
  CHECK(out.str().find("missing 1\n  ! 1,5,6,2\n") != std::string::npos);
}
