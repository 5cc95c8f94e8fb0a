#pragma once

#include <cstddef>
#include <map>
#include <ostream>

#include "flowmine/mining.hpp"

namespace flowmine::cli {

struct RunReport {
  std::size_t trace_count = 0;
  std::size_t message_count = 0;
  std::size_t model_size = 0;
  double acceptance_ratio = 0.0;
  double base_acceptance_ratio = 0.0;
  double runtime_seconds = 0.0;
  std::size_t iterations = 0;
  std::size_t candidate_count = 0;
  bool below_threshold = false;
  /// Completed instances of mined paths, keyed by path length.
  std::map<std::size_t, std::size_t> length_histogram;
};

RunReport make_report(const TraceSet& traces, const MiningResult& result, double runtime_seconds);

/// Stable text form. Runtime is left out so reruns compare byte for byte.
void write_report(std::ostream& out, const RunReport& report);
void write_report_json(std::ostream& out, const RunReport& report);

enum ExitCode : int { kOk = 0, kFailure = 1, kBelowThreshold = 2 };

/// Entry point behind the `flowmine` binary: `mine`, `generate`, `diff`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flowmine::cli
