#include "dilsim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <variant>

#include "dilsim/packets.hpp"

namespace dilsim {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

RunMetrics::RunMetrics(std::vector<int> consumers, int producer,
                       std::uint32_t fileChunks, int payloadBytes,
                       bool lossIncludeControl)
    : consumers_(std::move(consumers)), producer_(producer),
      fileChunks_(fileChunks), payloadBytes_(payloadBytes),
      lossIncludeControl_(lossIncludeControl) {
  for (int c : consumers_) flows_[c];
}

void RunMetrics::on_expressed(int consumer, std::uint32_t chunk, SimTime t) {
  FlowTrack& f = flows_.at(consumer);
  ChunkStat& cs = f.chunks[chunk];
  if (cs.txAttempts == 0) cs.firstExpressedNs = t.ns;
  ++cs.txAttempts;
  if (f.firstTxNs < 0) f.firstTxNs = t.ns;
}

void RunMetrics::on_delivered(int consumer, std::uint32_t chunk, SimTime t,
                              int hops, int servedBy) {
  FlowTrack& f = flows_.at(consumer);
  ChunkStat& cs = f.chunks[chunk];
  if (cs.deliveredNs >= 0) return;  // duplicate guard
  cs.deliveredNs = t.ns;
  cs.hopCount = hops;
  cs.servedBy = servedBy;
  f.rxBytes += payloadBytes_;
  f.lastRxNs = t.ns;
}

void RunMetrics::on_outcomes(const Frame& f,
                             const std::vector<ReceptionOutcome>& outs) {
  const bool isData = data_plane(f.kind);
  if (!isData && !lossIncludeControl_) {
    // still tracked as a diagnostic
    if (f.dstNode < 0) {
      for (const auto& o : outs) {
        if (o.status == RxStatus::Delivered) ++cSent_;
        if (o.status == RxStatus::Collided) {
          ++cSent_;
          ++cLost_;
        }
      }
    } else {
      ++cSent_;
      for (const auto& o : outs)
        if (o.receiver == f.dstNode && o.status != RxStatus::Delivered)
          ++cLost_;
    }
    return;
  }
  if (f.dstNode < 0) {
    // Broadcast: one offered packet per in-range receiver.
    for (const auto& o : outs) {
      if (o.status == RxStatus::Delivered) ++pSent_;
      if (o.status == RxStatus::Collided) {
        ++pSent_;
        ++pLoss_;
      }
    }
  } else {
    ++pSent_;
    for (const auto& o : outs)
      if (o.receiver == f.dstNode && o.status != RxStatus::Delivered) ++pLoss_;
  }
}

void RunMetrics::on_local_drop(FrameKind kind, SimTime) {
  if (data_plane(kind) || lossIncludeControl_) {
    ++pSent_;
    ++pLoss_;
  } else {
    ++cSent_;
    ++cLost_;
  }
}

void RunMetrics::on_route_change(int consumer, bool hasRoute, SimTime t) {
  auto it = flows_.find(consumer);
  if (it == flows_.end()) return;
  FlowTrack& f = it->second;
  if (hasRoute) {
    if (f.everHadRoute && f.stallStartNs >= 0) {
      f.stallS += dur::to_seconds(t.ns - f.stallStartNs);
      f.stallStartNs = -1;
    }
    f.everHadRoute = true;
    f.hasRoute = true;
  } else {
    if (f.everHadRoute && f.hasRoute) {
      f.stallStartNs = t.ns;
      ++f.stalls;
    }
    f.hasRoute = false;
  }
}

void RunMetrics::finish(SimTime end) {
  if (finished_) return;
  finished_ = true;
  const double lossRate =
      pSent_ > 0 ? static_cast<double>(pLoss_) / static_cast<double>(pSent_)
                 : 0.0;
  for (int c : consumers_) {
    FlowTrack& f = flows_.at(c);
    if (f.stallStartNs >= 0) {
      f.stallS += dur::to_seconds(end.ns - f.stallStartNs);
      f.stallStartNs = -1;
    }
    ConsumerSummary s;
    s.consumer = c;
    s.rxBytes = f.rxBytes;
    s.firstTxNs = f.firstTxNs;
    s.lastRxNs = f.lastRxNs;
    s.goodputBps = goodput_bps(f.rxBytes, f.firstTxNs, f.lastRxNs);
    s.lossRate = lossRate;
    s.pSent = pSent_;
    s.pLoss = pLoss_;
    double delaySum = 0.0;
    std::int64_t hopSum = 0;
    std::int64_t attemptSum = 0;
    for (const auto& [chunk, cs] : f.chunks) {
      (void)chunk;
      attemptSum += cs.txAttempts;
      s.totalRetries += cs.txAttempts > 0 ? cs.txAttempts - 1 : 0;
      if (cs.deliveredNs >= 0) {
        ++s.chunksDelivered;
        delaySum += dur::to_seconds(cs.deliveredNs - cs.firstExpressedNs);
        hopSum += cs.hopCount;
      } else if (cs.txAttempts > 0) {
        ++s.undelivered;
      }
    }
    if (s.chunksDelivered > 0) {
      s.meanDelayS = delaySum / static_cast<double>(s.chunksDelivered);
      s.meanHopCount = static_cast<double>(hopSum) /
                       static_cast<double>(s.chunksDelivered);
    }
    if (!f.chunks.empty())
      s.meanTxAttempts = static_cast<double>(attemptSum) /
                         static_cast<double>(f.chunks.size());
    s.completionFraction = static_cast<double>(s.chunksDelivered) /
                           static_cast<double>(fileChunks_);
    s.routeStallS = f.stallS;
    s.routeStalls = f.stalls;
    summaries_.push_back(s);
  }
}

const std::map<std::uint32_t, ChunkStat>& RunMetrics::chunks(
    int consumer) const {
  return flows_.at(consumer).chunks;
}

std::string render_chunks_csv(
    const std::vector<int>& consumers,
    const std::map<int, std::map<std::uint32_t, ChunkStat>>&
        chunksByConsumer) {
  std::string out =
      "consumer,chunk,firstExpressedNs,deliveredNs,delayS,hopCount,"
      "txAttempts,retries,servedBy\n";
  char buf[256];
  for (int c : consumers) {
    auto it = chunksByConsumer.find(c);
    if (it == chunksByConsumer.end()) continue;
    for (const auto& [chunk, cs] : it->second) {
      if (cs.deliveredNs >= 0) {
        std::snprintf(buf, sizeof(buf), "%d,%u,%lld,%lld,%.9f,%d,%d,%d,%d\n",
                      c, chunk, static_cast<long long>(cs.firstExpressedNs),
                      static_cast<long long>(cs.deliveredNs),
                      dur::to_seconds(cs.deliveredNs - cs.firstExpressedNs),
                      cs.hopCount, cs.txAttempts, cs.txAttempts - 1,
                      cs.servedBy);
      } else {
        std::snprintf(buf, sizeof(buf), "%d,%u,%lld,,,,%d,%d,\n", c, chunk,
                      static_cast<long long>(cs.firstExpressedNs),
                      cs.txAttempts, cs.txAttempts - 1);
      }
      out += buf;
    }
  }
  return out;
}

std::string render_summary_csv(const std::vector<ConsumerSummary>& summaries,
                               std::int64_t controlSent,
                               std::int64_t controlLost) {
  std::string out =
      "consumer,goodputBps,lossRate,rxBytes,pSent,pLoss,completionFraction,"
      "firstTxNs,lastRxNs,chunksDelivered,meanDelayS,meanHopCount,"
      "meanTxAttempts,totalRetries,undelivered,controlSent,controlLost,"
      "routeStallS,routeStalls\n";
  for (const auto& s : summaries) {
    out += std::to_string(s.consumer) + ',' + format_double(s.goodputBps) +
           ',' + format_double(s.lossRate) + ',' + std::to_string(s.rxBytes) +
           ',' + std::to_string(s.pSent) + ',' + std::to_string(s.pLoss) +
           ',' + format_double(s.completionFraction) + ',' +
           std::to_string(s.firstTxNs) + ',' + std::to_string(s.lastRxNs) +
           ',' + std::to_string(s.chunksDelivered) + ',' +
           format_double(s.meanDelayS) + ',' + format_double(s.meanHopCount) +
           ',' + format_double(s.meanTxAttempts) + ',' +
           std::to_string(s.totalRetries) + ',' +
           std::to_string(s.undelivered) + ',' + std::to_string(controlSent) +
           ',' + std::to_string(controlLost) + ',' +
           format_double(s.routeStallS) + ',' + std::to_string(s.routeStalls) +
           '\n';
  }
  return out;
}

std::string RunMetrics::chunks_csv() const {
  std::map<int, std::map<std::uint32_t, ChunkStat>> byConsumer;
  for (int c : consumers_) byConsumer[c] = flows_.at(c).chunks;
  return render_chunks_csv(consumers_, byConsumer);
}

std::string RunMetrics::summary_csv() const {
  if (!finished_) throw std::logic_error("summary before finish()");
  return render_summary_csv(summaries_, cSent_, cLost_);
}

SeedAggregate aggregate_seeds(const std::vector<double>& perRunValues) {
  if (perRunValues.empty())
    throw std::invalid_argument("aggregate_seeds: empty run list");
  SeedAggregate a;
  a.nRuns = perRunValues.size();
  a.min = perRunValues.front();
  a.max = perRunValues.front();
  double sum = 0.0;
  for (double v : perRunValues) {
    sum += v;
    a.min = std::min(a.min, v);
    a.max = std::max(a.max, v);
  }
  a.mean = sum / static_cast<double>(perRunValues.size());
  return a;
}

}  // namespace dilsim
