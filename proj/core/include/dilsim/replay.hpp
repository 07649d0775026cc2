#pragma once

#include <string>
#include <vector>

#include "dilsim/metrics.hpp"

namespace dilsim {

struct ReplayResult {
  std::vector<ConsumerSummary> summaries;
  std::string chunksCsv;
  std::string summaryCsv;
};

/// Recomputes every metric of a run purely from its newline-delimited event
/// log: per-chunk delays and hop counts from expr/dlv records, goodput from
/// the flow edges, loss counters from tx/rx/drop records, stall intervals
/// from route records. Accumulation is written independently of RunMetrics;
/// the two must agree bit-exactly on the rendered CSVs.
ReplayResult replay_event_log(const std::string& path);

}  // namespace dilsim
