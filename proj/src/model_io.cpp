#include "flowmine/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <optional>
#include <sstream>

namespace flowmine {

void write_model(std::ostream& out, const FlowModel& model, double acceptance_ratio,
                 const MessageDictionary* dict) {
  auto flags = out.flags();
  auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  out << "flowmodel v1\n";
  out << "size " << model.size() << '\n';
  out << "acceptance_ratio " << acceptance_ratio << '\n';
  for (const auto& p : model.paths()) {
    out << "path " << format_sequence(p.sequence, ",") << " forward=" << p.forward_score
        << " backward=" << p.backward_score << " essential=" << p.essential_count
        << " score=" << p.score << '\n';
    if (dict) {
      for (auto id : p.sequence) out << "  " << id << ' ' << dict->at(id).quadruple() << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

namespace {

double parse_double(std::string_view text, std::size_t line) {
  try {
    std::size_t used = 0;
    std::string s(text);
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "bad number `" + std::string(text) + "`", line);
  }
}

std::size_t parse_count(std::string_view text, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Parse, "bad count `" + std::string(text) + "`", line);
  }
  return v;
}

std::vector<MessageId> parse_id_list(std::string_view text, std::size_t line) {
  std::vector<MessageId> ids;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto token = text.substr(start, comma == std::string_view::npos ? text.size() - start : comma - start);
    MessageId id = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      throw Error(ErrorKind::Parse, "bad path `" + std::string(text) + "`", line);
    }
    ids.push_back(id);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return ids;
}

}  // namespace

ModelDocument parse_model(std::istream& in) {
  ModelDocument doc;
  std::string raw;
  std::size_t line_no = 0;
  bool header = false;
  std::optional<std::size_t> declared_size;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.empty() || raw[0] == '#' || raw[0] == ' ') continue;
    std::istringstream ls(raw);
    std::string word;
    ls >> word;
    if (word == "flowmodel") {
      std::string version;
      ls >> version;
      if (version != "v1") throw Error(ErrorKind::Parse, "unsupported model version", line_no);
      header = true;
    } else if (!header) {
      throw Error(ErrorKind::Parse, "missing `flowmodel v1` header", line_no);
    } else if (word == "size") {
      std::string n;
      ls >> n;
      declared_size = parse_count(n, line_no);
    } else if (word == "acceptance_ratio") {
      std::string r;
      ls >> r;
      doc.acceptance_ratio = parse_double(r, line_no);
    } else if (word == "path") {
      std::string ids;
      ls >> ids;
      Path p{parse_id_list(ids, line_no)};
      std::string field;
      while (ls >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Parse, "bad field `" + field + "`", line_no);
        auto key = field.substr(0, eq);
        auto value = std::string_view(field).substr(eq + 1);
        if (key == "forward") p.forward_score = parse_double(value, line_no);
        else if (key == "backward") p.backward_score = parse_double(value, line_no);
        else if (key == "essential") p.essential_count = parse_count(value, line_no);
        else if (key == "score") p.score = parse_double(value, line_no);
        else throw Error(ErrorKind::Parse, "unknown field `" + key + "`", line_no);
      }
      if (!doc.model.add(std::move(p))) {
        throw Error(ErrorKind::Duplicate, "path listed twice", line_no);
      }
    } else {
      throw Error(ErrorKind::Parse, "unexpected line `" + raw + "`", line_no);
    }
  }
  if (!header) throw Error(ErrorKind::Parse, "missing `flowmodel v1` header");
  if (declared_size && *declared_size != doc.model.size()) {
    throw Error(ErrorKind::Parse, "declared size " + std::to_string(*declared_size) +
                                      " does not match " + std::to_string(doc.model.size()) +
                                      " paths");
  }
  return doc;
}

ModelDocument parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_model(in);
}

void write_flows_dot(std::ostream& out, const FlowModel& model, const MessageDictionary& dict) {
  std::size_t k = 0;
  for (const auto& p : model.paths()) {
    out << "digraph flow_" << k++ << " {\n";
    out << "  label=\"" << format_sequence(p.sequence, ",") << "\";\n";
    for (std::size_t i = 0; i < p.sequence.size(); ++i) {
      // Positions, not ids, name the nodes: a message may repeat in a flow.
      out << "  n" << i << " [label=\"" << p.sequence[i] << ": "
          << dict.at(p.sequence[i]).quadruple() << "\"];\n";
    }
    for (std::size_t i = 0; i + 1 < p.sequence.size(); ++i) {
      out << "  n" << i << " -> n" << i + 1 << ";\n";
    }
    out << "}\n";
  }
}

ModelDiff diff_models(const ModelDocument& a, const ModelDocument& b) {
  ModelDiff diff;
  diff.ratio_a = a.acceptance_ratio;
  diff.ratio_b = b.acceptance_ratio;
  for (const auto& p : a.model.paths()) {
    if (!b.model.contains(p.sequence)) diff.only_a.push_back(p.sequence);
  }
  for (const auto& p : b.model.paths()) {
    if (!a.model.contains(p.sequence)) diff.only_b.push_back(p.sequence);
  }
  std::sort(diff.only_a.begin(), diff.only_a.end());
  std::sort(diff.only_b.begin(), diff.only_b.end());
  auto in_b = b.model.messages();
  for (const auto& s : diff.only_a) {
    for (auto id : std::set<MessageId>(s.begin(), s.end())) {
      ++diff.missing_frequency[id];
      if (!in_b.count(id)) diff.implicated.insert(id);
    }
  }
  for (const auto& s : diff.only_a) {
    if (std::any_of(s.begin(), s.end(), [&](MessageId id) { return diff.implicated.count(id); })) {
      diff.missing.push_back(s);
    }
  }
  return diff;
}

void write_diff(std::ostream& out, const ModelDiff& diff) {
  auto flags = out.flags();
  auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  out << "acceptance_ratio a=" << diff.ratio_a << " b=" << diff.ratio_b << '\n';
  out << "only_in_a " << diff.only_a.size() << '\n';
  for (const auto& s : diff.only_a) out << "  - " << format_sequence(s, ",") << '\n';
  out << "missing " << diff.missing.size() << '\n';
  for (const auto& s : diff.missing) out << "  ! " << format_sequence(s, ",") << '\n';
  out << "only_in_b " << diff.only_b.size() << '\n';
  for (const auto& s : diff.only_b) out << "  + " << format_sequence(s, ",") << '\n';
  out << "implicated " << format_sequence({diff.implicated.begin(), diff.implicated.end()}, ",")
      << '\n';
  for (const auto& [id, n] : diff.missing_frequency) {
    out << "  " << id << " in " << n << " a-only path(s)\n";
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace flowmine
