#include <doctest.h>

#include <random>
#include <sstream>

#include "flowmine/trace_model.hpp"
#include "oracles.hpp"

using namespace flowmine;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected flowmine::Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("causal follows destination to source") {
  auto dict = oracle::fig2_dictionary();
  CHECK(dict.causal(1, 5));
  CHECK_FALSE(dict.causal(2, 5));
  Message self{9, "cache", "cache", "fill", MessageKind::Request};
  CHECK(causal(self, self));
}

TEST_CASE("parse_message_definitions on the two-CPU example") {
  auto dict = oracle::fig2_dictionary();
  CHECK(dict.size() == 6);
  CHECK(dict.initial() == std::set<MessageId>{1, 3});
  CHECK(dict.terminal() == std::set<MessageId>{2, 4});
  CHECK(dict.at(5).quadruple() == "cache:mem:rd:req");
  CHECK(dict.at(6).kind == MessageKind::Response);
}

TEST_CASE("parse_message_definitions errors") {
  CHECK(kind_of([] { parse_message_definitions(""); }) == ErrorKind::EmptyDictionary);
  CHECK(kind_of([] { parse_message_definitions("# only a comment\n\n"); }) ==
        ErrorKind::EmptyDictionary);
  CHECK(kind_of([] {
          parse_message_definitions("1 (a:b:rd:req)\n2 (b:a:rd:resp)\ninitial = {7}\n");
        }) == ErrorKind::Reference);
  CHECK(kind_of([] { parse_message_definitions("1 (a:b:rd:req)\n1 (b:a:rd:resp)\n"); }) ==
        ErrorKind::Duplicate);
  CHECK(kind_of([] { parse_message_definitions("1 (a:b:rd:req)\n2 (a:b:rd:req)\n"); }) ==
        ErrorKind::Duplicate);
  CHECK(kind_of([] {
          parse_message_definitions("1 (a:b:rd:req)\ninitial = {1}\nterminal = {1}\n");
        }) == ErrorKind::InvalidDictionary);
  CHECK(kind_of([] { parse_message_definitions("1 (a:b:rd:maybe)\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_message_definitions("1 (a:b-c:rd:req)\n"); }) == ErrorKind::Parse);

  try {
    parse_message_definitions("1 (a:b:rd:req)\n\n# c\n2 a:b:wr:req\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(e.line() == 4);
  }
}

TEST_CASE("parse_message_definitions tolerates comments and spacing") {
  auto dict = parse_message_definitions(
      "  1 (a:b:rd:req)   # first\n"
      "2 (b:a:rd:resp)\n"
      "initial = { 1 }\n"
      "terminal={2}\n");
  CHECK(dict.initial() == std::set<MessageId>{1});
  CHECK(dict.terminal() == std::set<MessageId>{2});
}

TEST_CASE("parse_traces") {
  auto dict = oracle::fig2_dictionary();
  auto one = parse_traces("3 4 1 1 5 6 2 5 6 2 1 2 3 4\n", dict);
  REQUIRE(one.size() == 1);
  CHECK(one.traces[0].size() == 14);
  CHECK(one.traces[0].events == oracle::worked_trace());

  auto two = parse_traces("# header\n1 2\n\n3 4\n", dict);
  REQUIRE(two.size() == 2);
  CHECK(two.traces[0].events == std::vector<MessageId>{1, 2});
  CHECK(two.traces[1].events == std::vector<MessageId>{3, 4});
  CHECK(two.total_messages() == 4);

  try {
    parse_traces("1 2\n1 9\n", dict);
    FAIL("expected a reference error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Reference);
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK(kind_of([&] { parse_traces("1 x\n", dict); }) == ErrorKind::Parse);
}

TEST_CASE("dictionary serialization round-trips") {
  std::mt19937_64 rng(11);
  const char* components[] = {"cpu0", "cpu1", "cache", "mem", "dma", "l2"};
  const char* commands[] = {"rd", "wr", "inv"};
  for (int round = 0; round < 50; ++round) {
    MessageDictionary dict;
    std::uniform_int_distribution<int> comp(0, 5);
    std::uniform_int_distribution<int> cmd(0, 2);
    std::uniform_int_distribution<int> kind(0, 1);
    MessageId next = 1;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Message m{next, components[comp(rng)], components[comp(rng)], commands[cmd(rng)],
                kind(rng) ? MessageKind::Request : MessageKind::Response};
      try {
        dict.add(m);
        ++next;
      } catch (const Error&) {
        // duplicate quadruple; draw again
      }
    }
    for (auto& [id, m] : dict.messages()) {
      if (id % 3 == 1) dict.mark_initial(id);
      if (id % 3 == 2) dict.mark_terminal(id);
    }
    std::ostringstream out;
    write_message_definitions(out, dict);
    auto back = parse_message_definitions(out.str());
    CHECK(back == dict);
  }
}

TEST_CASE("trace serialization round-trips") {
  auto dict = oracle::fig2_dictionary();
  TraceSet set{{Trace{oracle::worked_trace()}, Trace{{1, 2}}}};
  std::ostringstream out;
  write_traces(out, set);
  CHECK(out.str() == "3 4 1 1 5 6 2 5 6 2 1 2 3 4\n1 2\n");
  CHECK(parse_traces(out.str(), dict) == set);
}
