#include "dilsim/replay.hpp"

#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace dilsim {

using nlohmann::json;

ReplayResult replay_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open event log: " + path);

  std::vector<int> consumers;
  int producer = -1;
  std::uint32_t fileChunks = 0;
  int payloadBytes = 0;
  std::int64_t simEndNs = 0;
  bool lossIncludeControl = false;
  bool haveMeta = false;

  struct Flow {
    std::map<std::uint32_t, ChunkStat> chunks;
    std::int64_t firstTxNs{-1};
    std::int64_t lastRxNs{-1};
    std::int64_t rxBytes{0};
    bool everHadRoute{false};
    bool hasRoute{false};
    std::int64_t stallStartNs{-1};
    double stallS{0.0};
    std::int64_t stalls{0};
  };
  std::map<int, Flow> flows;

  struct TxInfo {
    bool dataPlane;
    int dst;
    bool lossPending;  // unicast: assume lost until Delivered by dst
  };
  std::unordered_map<std::uint64_t, TxInfo> frames;
  std::int64_t pSent = 0, pLoss = 0, cSent = 0, cLost = 0;

  auto isDataKind = [](const std::string& k) {
    return k == "int" || k == "dat" || k == "seg" || k == "ack";
  };

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const std::string ev = j.at("ev").get<std::string>();
    if (ev == "meta") {
      haveMeta = true;
      for (const auto& c : j.at("consumers")) {
        consumers.push_back(c.get<int>());
        flows[consumers.back()];
      }
      producer = j.at("producer").get<int>();
      fileChunks = j.at("fileChunks").get<std::uint32_t>();
      payloadBytes = j.at("payloadBytes").get<int>();
      simEndNs = j.at("simEndNs").get<std::int64_t>();
      lossIncludeControl = j.at("lossIncludeControl").get<int>() != 0;
      continue;
    }
    const std::int64_t t = j.at("t").get<std::int64_t>();
    if (ev == "expr") {
      Flow& f = flows.at(j.at("n").get<int>());
      ChunkStat& cs = f.chunks[j.at("c").get<std::uint32_t>()];
      if (cs.txAttempts == 0) cs.firstExpressedNs = t;
      ++cs.txAttempts;
      if (f.firstTxNs < 0) f.firstTxNs = t;
    } else if (ev == "dlv") {
      Flow& f = flows.at(j.at("n").get<int>());
      ChunkStat& cs = f.chunks[j.at("c").get<std::uint32_t>()];
      if (cs.deliveredNs < 0) {
        cs.deliveredNs = t;
        cs.hopCount = j.at("h").get<int>();
        cs.servedBy = j.at("srv").get<int>();
        f.rxBytes += payloadBytes;
        f.lastRxNs = t;
      }
    } else if (ev == "tx") {
      TxInfo info;
      info.dataPlane = isDataKind(j.at("k").get<std::string>());
      info.dst = j.at("d").get<int>();
      info.lossPending = false;
      const bool counted = info.dataPlane || lossIncludeControl;
      if (info.dst >= 0) {
        if (counted) {
          ++pSent;
          info.lossPending = true;
        } else {
          ++cSent;
          info.lossPending = true;
        }
      }
      frames[j.at("f").get<std::uint64_t>()] = info;
    } else if (ev == "rx") {
      auto fit = frames.find(j.at("f").get<std::uint64_t>());
      if (fit == frames.end()) continue;
      TxInfo& info = fit->second;
      const bool delivered = j.at("out").get<std::string>() == "D";
      const bool counted = info.dataPlane || lossIncludeControl;
      if (info.dst < 0) {
        // broadcast: one offered packet per in-range receiver
        if (counted) {
          ++pSent;
          if (!delivered) ++pLoss;
        } else {
          ++cSent;
          if (!delivered) ++cLost;
        }
      } else if (j.at("n").get<int>() == info.dst && delivered) {
        info.lossPending = false;
      }
    } else if (ev == "drop") {
      const std::string k = j.at("k").get<std::string>();
      const bool data = k != "ctl";
      if (data || lossIncludeControl) {
        ++pSent;
        ++pLoss;
      } else {
        ++cSent;
        ++cLost;
      }
    } else if (ev == "route") {
      auto it = flows.find(j.at("n").get<int>());
      if (it == flows.end()) continue;
      Flow& f = it->second;
      const bool hasRoute = j.at("h").get<int>() >= 0;
      if (hasRoute) {
        if (f.everHadRoute && f.stallStartNs >= 0) {
          f.stallS += dur::to_seconds(t - f.stallStartNs);
          f.stallStartNs = -1;
        }
        f.everHadRoute = true;
        f.hasRoute = true;
      } else {
        if (f.everHadRoute && f.hasRoute) {
          f.stallStartNs = t;
          ++f.stalls;
        }
        f.hasRoute = false;
      }
    }
  }
  if (!haveMeta) throw std::runtime_error("event log has no meta record");
  (void)producer;

  // Unresolved unicast frames were never delivered to their next hop.
  for (auto& [id, info] : frames) {
    (void)id;
    if (info.dst >= 0 && info.lossPending) {
      if (info.dataPlane || lossIncludeControl)
        ++pLoss;
      else
        ++cLost;
    }
  }

  const double lossRate =
      pSent > 0 ? static_cast<double>(pLoss) / static_cast<double>(pSent)
                : 0.0;

  ReplayResult out;
  std::map<int, std::map<std::uint32_t, ChunkStat>> byConsumer;
  for (int c : consumers) {
    Flow& f = flows.at(c);
    if (f.stallStartNs >= 0) {
      f.stallS += dur::to_seconds(simEndNs - f.stallStartNs);
      f.stallStartNs = -1;
    }
    ConsumerSummary s;
    s.consumer = c;
    s.rxBytes = f.rxBytes;
    s.firstTxNs = f.firstTxNs;
    s.lastRxNs = f.lastRxNs;
    s.goodputBps = goodput_bps(f.rxBytes, f.firstTxNs, f.lastRxNs);
    s.lossRate = lossRate;
    s.pSent = pSent;
    s.pLoss = pLoss;
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
      s.meanHopCount =
          static_cast<double>(hopSum) / static_cast<double>(s.chunksDelivered);
    }
    if (!f.chunks.empty())
      s.meanTxAttempts = static_cast<double>(attemptSum) /
                         static_cast<double>(f.chunks.size());
    s.completionFraction = static_cast<double>(s.chunksDelivered) /
                           static_cast<double>(fileChunks);
    s.routeStallS = f.stallS;
    s.routeStalls = f.stalls;
    out.summaries.push_back(s);
    byConsumer[c] = f.chunks;
  }
  out.chunksCsv = render_chunks_csv(consumers, byConsumer);
  out.summaryCsv = render_summary_csv(out.summaries, cSent, cLost);
  return out;
}

}  // namespace dilsim
