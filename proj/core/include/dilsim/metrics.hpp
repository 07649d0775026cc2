#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dilsim/radio.hpp"
#include "dilsim/time.hpp"

namespace dilsim {

/// Per-consumer flow summary plus the run-wide loss counters.
struct ConsumerSummary {
  int consumer{-1};
  std::int64_t rxBytes{0};
  double goodputBps{0.0};
  double lossRate{0.0};  // run-level, repeated on each row
  std::int64_t pSent{0};
  std::int64_t pLoss{0};
  double completionFraction{0.0};
  std::int64_t firstTxNs{-1};
  std::int64_t lastRxNs{-1};
  std::int64_t chunksDelivered{0};
  double meanDelayS{0.0};
  double meanHopCount{0.0};
  double meanTxAttempts{0.0};
  std::int64_t totalRetries{0};
  std::int64_t undelivered{0};
  double routeStallS{0.0};
  std::int64_t routeStalls{0};
};

struct ChunkStat {
  std::int64_t firstExpressedNs{-1};
  std::int64_t deliveredNs{-1};
  int hopCount{-1};
  int txAttempts{0};
  int servedBy{-1};
};

/// Canonical metric arithmetic, shared with nothing: the replay oracle
/// re-implements its own accumulation and must agree bit-exactly, so the
/// formulas are pinned here in one place.
inline double goodput_bps(std::int64_t rxBytes, std::int64_t firstTxNs,
                          std::int64_t lastRxNs) {
  if (rxBytes <= 0 || lastRxNs <= firstTxNs) return 0.0;
  return static_cast<double>(rxBytes) * 8.0 /
         (static_cast<double>(lastRxNs - firstTxNs) / 1e9);
}

/// Trace capture for one run. Hooks are wired to the medium, the apps and
/// the routing agents; everything else is derived at finish().
class RunMetrics {
 public:
  RunMetrics(std::vector<int> consumers, int producer,
             std::uint32_t fileChunks, int payloadBytes,
             bool lossIncludeControl);

  // application-level
  void on_expressed(int consumer, std::uint32_t chunk, SimTime t);
  void on_delivered(int consumer, std::uint32_t chunk, SimTime t, int hops,
                    int servedBy);

  // medium-level
  void on_outcomes(const Frame& f, const std::vector<ReceptionOutcome>& outs);
  void on_local_drop(FrameKind kind, SimTime t);

  // routing-level (consumer's route to the producer)
  void on_route_change(int consumer, bool hasRoute, SimTime t);

  void finish(SimTime end);

  const std::map<std::uint32_t, ChunkStat>& chunks(int consumer) const;
  const std::vector<ConsumerSummary>& summaries() const { return summaries_; }
  std::int64_t packets_sent() const { return pSent_; }
  std::int64_t packets_lost() const { return pLoss_; }
  std::int64_t control_sent() const { return cSent_; }
  std::int64_t control_lost() const { return cLost_; }

  std::string chunks_csv() const;
  std::string summary_csv() const;

  static bool data_plane(FrameKind k) {
    return k != FrameKind::OlsrControl;
  }

 private:
  struct FlowTrack {
    std::map<std::uint32_t, ChunkStat> chunks;
    std::int64_t firstTxNs{-1};
    std::int64_t lastRxNs{-1};
    std::int64_t rxBytes{0};
    // route availability at this consumer
    bool everHadRoute{false};
    bool hasRoute{false};
    std::int64_t stallStartNs{-1};
    double stallS{0.0};
    std::int64_t stalls{0};
  };

  std::vector<int> consumers_;
  int producer_;
  std::uint32_t fileChunks_;
  int payloadBytes_;
  bool lossIncludeControl_;
  std::map<int, FlowTrack> flows_;
  std::int64_t pSent_{0};
  std::int64_t pLoss_{0};
  std::int64_t cSent_{0};
  std::int64_t cLost_{0};
  std::vector<ConsumerSummary> summaries_;
  bool finished_{false};
};

/// Mean/min/max of one metric across seeds.
struct SeedAggregate {
  double mean{0.0};
  double min{0.0};
  double max{0.0};
  std::size_t nRuns{0};
};

SeedAggregate aggregate_seeds(const std::vector<double>& perRunValues);

std::string format_double(double v);  // round-trip formatting

/// CSV layouts are shared verbatim between the live metrics module and the
/// replay oracle; only the accumulation differs.
std::string render_chunks_csv(
    const std::vector<int>& consumers,
    const std::map<int, std::map<std::uint32_t, ChunkStat>>& chunksByConsumer);
std::string render_summary_csv(const std::vector<ConsumerSummary>& summaries,
                               std::int64_t controlSent,
                               std::int64_t controlLost);

}  // namespace dilsim
