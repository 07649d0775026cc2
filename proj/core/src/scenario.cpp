#include "dilsim/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace dilsim {

namespace fs = std::filesystem;

GridRoles grid_roles() { return GridRoles{}; }

namespace {

std::string node_stream(const char* concern, int id) {
  return std::string(concern) + "/node" + std::to_string(id);
}

struct Placement {
  std::vector<Vec2> pos;
  std::vector<NodeRole> role;
};

// Two rows of routers one grid step apart; producer and consumers sit at
// equilateral-triangle points so each attaches to TWO adjacent routers that
// are in range of each other (carrier sense serializes the last hop instead
// of hidden-terminal collisions starving it). Shortest paths: consumer 1 at
// 8 hops, consumer 2 at 6 (checked at build time).
Placement controlled_grid_placement(const ScenarioConfig& cfg) {
  const double g = cfg.mobility.gridSpacingM;
  const double apex = g * 0.86602540378443865;  // sqrt(3)/2
  const GridRoles r = grid_roles();
  Placement p;
  p.pos.resize(21);
  p.role.resize(21);
  p.pos[r.consumer1] = {6.5 * g, -apex};  // attaches to F6, F7
  p.pos[r.consumer2] = {4.5 * g, -apex};  // attaches to F4, F5
  p.role[r.consumer1] = NodeRole::Consumer;
  p.role[r.consumer2] = NodeRole::Consumer;
  for (int i = 0; i < 9; ++i) {
    p.pos[r.firstFixed + i] = {i * g, 0};
    p.role[r.firstFixed + i] = NodeRole::FixedRouter;
    p.pos[r.firstMobile + i] = {i * g, g};
    p.role[r.firstMobile + i] = NodeRole::MobileRouter;
  }
  p.pos[r.producer] = {0.5 * g, g + apex};  // attaches to M0, M1
  p.role[r.producer] = NodeRole::Producer;
  return p;
}

// Hop distances over the static layout with the configured radio range;
// diagonal grid neighbours (spacing*sqrt(2)) are out of range by design.
std::vector<int> bfs_hops(const std::vector<Vec2>& pos, double rangeM,
                          int from) {
  const int n = static_cast<int>(pos.size());
  std::vector<int> dist(n, -1);
  std::queue<int> q;
  dist[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v = 0; v < n; ++v) {
      if (dist[v] >= 0 || v == u) continue;
      if (distance(pos[u], pos[v]) <= rangeM) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

CachePolicy policy_for(const ScenarioConfig& cfg, NodeRole role) {
  if (cfg.ndn.cachePolicy == CachePolicy::Lru) return CachePolicy::Lru;
  switch (cfg.ndn.plruScope) {
    case PlruScope::FixedNodesOnly:
      return role == NodeRole::FixedRouter ? CachePolicy::Plru
                                           : CachePolicy::Lru;
    case PlruScope::AllMobileNodes:
      return CachePolicy::Plru;
  }
  return CachePolicy::Lru;
}

void install_ndn(SimulationInstance& inst) {
  const ScenarioConfig& cfg = inst.cfg;
  StrategyConfig strat;
  strat.deferWindow = cfg.ndn.deferWindow;
  strat.pitLifetime = dur::from_seconds(cfg.ndn.pitLifetimeS);
  strat.interestPayloadBytes = cfg.ndn.interestPayloadBytes;

  for (auto& up : inst.nodes) {
    Node& n = *up;
    const CachePolicy pol = policy_for(cfg, n.role());
    n.cs = std::make_unique<ContentStore>(
        cfg.ndn.csCapacity, pol,
        pol == CachePolicy::Plru ? cfg.ndn.plruP : 1.0);
    n.forwarder = std::make_unique<NdnForwarder>(
        inst.sim, *n.mac, *n.cs, strat, cfg.radio.slotTime,
        RngStream(cfg.seed, node_stream("defer", n.id())),
        RngStream(cfg.seed, node_stream("plru", n.id())), n.id());
    NdnForwarder* fw = n.forwarder.get();
    n.mac->onSent = [fw](std::uint64_t token, const Frame&) {
      fw->handle_frame_sent(token);
    };
    fw->channelBusy = [medium = inst.medium.get(), id = n.id()] {
      return medium->carrier_busy(id) || medium->transmitting(id);
    };
  }

  Node& prod = inst.node(inst.producer);
  prod.producerApp = std::make_unique<ProducerApp>(
      cfg.contentPrefix, cfg.fileChunks, cfg.payloadBytes, inst.producer);
  ProducerApp* papp = prod.producerApp.get();
  prod.forwarder->contentSource = [papp](const Interest& in) {
    return papp->serve(in);
  };

  ConsumerParams cp;
  cp.prefix = cfg.contentPrefix;
  cp.fileChunks = cfg.fileChunks;
  cp.window = cfg.ndn.window;
  cp.initialRto = dur::from_seconds(cfg.ndn.initialRtoS);
  cp.minRto = dur::from_seconds(cfg.ndn.minRtoS);
  cp.maxRto = dur::from_seconds(cfg.ndn.maxRtoS);

  for (std::size_t i = 0; i < inst.consumers.size(); ++i) {
    const int cid = inst.consumers[i];
    Node& c = inst.node(cid);
    const SimTime startAt =
        SimTime{dur::from_seconds(i == 0 ? 0.0 : cfg.consumer2StartS)};
    c.consumerApp = std::make_unique<ConsumerApp>(
        inst.sim, *c.forwarder, cp,
        RngStream(cfg.seed, node_stream("app", cid)), cid, startAt);
    ConsumerApp* app = c.consumerApp.get();
    c.forwarder->localDelivery = [app](const DataPkt& d) { app->on_chunk(d); };

    RunMetrics* metrics = inst.metrics.get();
    EventLogger* log = inst.logger.get();
    Simulator* sim = &inst.sim;
    app->onExpressed = [metrics, log, sim, cid](std::uint32_t chunk,
                                                int attempt) {
      metrics->on_expressed(cid, chunk, sim->now());
      if (log) log->expressed(sim->now(), cid, chunk, attempt);
    };
    app->onDelivered = [metrics, log, sim, cid](std::uint32_t chunk,
                                                const DataPkt& d, int attempts,
                                                SimTime firstExpressed) {
      (void)attempts;
      (void)firstExpressed;
      metrics->on_delivered(cid, chunk, sim->now(), d.hopsTravelled,
                            d.servedBy);
      if (log)
        log->delivered(sim->now(), cid, chunk, d.hopsTravelled, d.servedBy);
    };
    app->start();
  }
}

void install_olsr(SimulationInstance& inst) {
  const ScenarioConfig& cfg = inst.cfg;
  OlsrConfig oc;
  oc.helloInterval = dur::from_seconds(cfg.olsr.helloIntervalS);
  oc.tcInterval = dur::from_seconds(cfg.olsr.tcIntervalS);
  oc.neighborHold = dur::from_seconds(cfg.olsr.neighborHoldS);
  oc.topologyHold = dur::from_seconds(cfg.olsr.topologyHoldS);
  oc.maxJitter = dur::from_seconds(cfg.olsr.maxJitterS);

  RunMetrics* metrics = inst.metrics.get();
  EventLogger* log = inst.logger.get();
  Simulator* sim = &inst.sim;

  for (auto& up : inst.nodes) {
    Node& n = *up;
    n.olsr = std::make_unique<OlsrNode>(
        inst.sim, *n.mac, n.id(), oc,
        RngStream(cfg.seed, node_stream("olsr", n.id())));
    n.onSegmentDrop = [metrics, log, sim, id = n.id()](const Segment& s,
                                                       const char* why) {
      metrics->on_local_drop(FrameKind::TransportSegment, sim->now());
      if (log)
        log->drop(sim->now(), id, FrameKind::TransportSegment, s.dstNode, why);
    };
    n.olsr->start();
  }

  Node& prod = inst.node(inst.producer);
  for (std::size_t i = 0; i < inst.consumers.size(); ++i) {
    const int cid = inst.consumers[i];
    Node& c = inst.node(cid);
    const SimTime startAt =
        SimTime{dur::from_seconds(i == 0 ? 0.0 : cfg.consumer2StartS)};

    const bool reliable = cfg.stack == StackKind::OlsrTcp;
    c.flowReceiver = std::make_unique<FlowReceiver>(
        cid, cid, static_cast<int>(cfg.fileChunks), reliable);
    c.flowReceiver->sendSegment = [&c](const Segment& s) {
      return c.send_segment(s);
    };
    c.flowReceiver->onNewSegment = [metrics, log, sim, cid,
                                    prodId = inst.producer](
                                       std::uint32_t seq, const Segment& s) {
      metrics->on_delivered(cid, seq, sim->now(), s.hopsTravelled, prodId);
      if (log)
        log->delivered(sim->now(), cid, seq, s.hopsTravelled, prodId);
    };

    if (reliable) {
      ReliableParams rp;
      rp.totalSegments = static_cast<int>(cfg.fileChunks);
      rp.segmentBytes = cfg.payloadBytes;
      rp.initialRto = dur::from_seconds(cfg.transport.initialRtoS);
      rp.minRto = dur::from_seconds(cfg.transport.minRtoS);
      rp.maxRto = dur::from_seconds(cfg.transport.maxRtoS);
      auto sender = std::make_unique<ReliableSender>(
          inst.sim, rp, cid, inst.producer, cid, startAt);
      sender->sendSegment = [&prod](const Segment& s) {
        return prod.send_segment(s);
      };
      sender->onSegmentSent = [metrics, log, sim, cid](std::uint32_t seq,
                                                       int attempt) {
        metrics->on_expressed(cid, seq, sim->now());
        if (log) log->expressed(sim->now(), cid, seq, attempt);
      };
      sender->start();
      prod.senders[cid] = std::move(sender);
    } else {
      ConstantRateParams cp;
      cp.totalSegments = static_cast<int>(cfg.fileChunks);
      cp.segmentBytes = cfg.payloadBytes;
      cp.rateBps = cfg.transport.crRateBps;
      // one open-loop flow per consumer; sender keyed like the reliable ones
      auto sender = std::make_unique<ConstantRateSender>(
          inst.sim, cp, cid, inst.producer, cid, startAt);
      sender->sendSegment = [&prod](const Segment& s) {
        return prod.send_segment(s);
      };
      sender->onSegmentSent = [metrics, log, sim, cid](std::uint32_t seq,
                                                       int attempt) {
        metrics->on_expressed(cid, seq, sim->now());
        if (log) log->expressed(sim->now(), cid, seq, attempt);
      };
      sender->start();
      prod.crSenders[cid] = std::move(sender);
    }

    c.olsr->watch_route(inst.producer,
                        [metrics, log, sim, cid](int dest,
                                                 std::optional<int> hops) {
                          metrics->on_route_change(cid, hops.has_value(),
                                                   sim->now());
                          if (log)
                            log->route(sim->now(), cid, dest,
                                       hops.value_or(-1));
                        });
  }
}

}  // namespace

void SimulationInstance::run_to_end() {
  const SimTime end{dur::from_seconds(cfg.simDurationS)};
  sim.run_until(end);
  metrics->finish(end);
  if (logger) logger->flush();
}

std::unique_ptr<SimulationInstance> build_scenario(
    const ScenarioConfig& cfg, const std::string& eventLogPath) {
  validate_config(cfg);
  auto inst = std::make_unique<SimulationInstance>();
  inst->cfg = cfg;

  // --- placement and roles ---
  Placement pl;
  if (cfg.topology == TopologyKind::ControlledGrid) {
    if (cfg.nodeCount != 21)
      throw ConfigError("controlledGrid topology requires nodeCount=21");
    pl = controlled_grid_placement(cfg);
    const double range = sensitivity_range_m(cfg.radio);
    const GridRoles r = grid_roles();
    const auto hops = bfs_hops(pl.pos, range, r.producer);
    if (hops[r.consumer1] != 8 || hops[r.consumer2] != 6) {
      std::ostringstream msg;
      msg << "layout error: controlledGrid shortest paths must be 8/6 hops, "
          << "got " << hops[r.consumer1] << "/" << hops[r.consumer2]
          << " (range " << range << " m)";
      throw ConfigError(msg.str());
    }
  } else {
    pl.pos.resize(cfg.nodeCount);
    pl.role.assign(cfg.nodeCount, NodeRole::MobileRouter);
    RngStream placement(cfg.seed, "placement");
    for (int i = 0; i < cfg.nodeCount; ++i) {
      pl.pos[i] = {placement.uniform_range(0.0, cfg.mobility.boundsM),
                   placement.uniform_range(0.0, cfg.mobility.boundsM)};
    }
    pl.role[0] = NodeRole::Consumer;
    pl.role[1] = NodeRole::Consumer;
    pl.role[cfg.nodeCount - 1] = NodeRole::Producer;
  }

  // --- roles registry ---
  for (int i = 0; i < cfg.nodeCount; ++i) {
    switch (pl.role[i]) {
      case NodeRole::Consumer: inst->consumers.push_back(i); break;
      case NodeRole::FixedRouter: inst->fixedRouters.push_back(i); break;
      case NodeRole::MobileRouter: inst->mobileRouters.push_back(i); break;
      case NodeRole::Producer: inst->producer = i; break;
    }
  }

  inst->metrics = std::make_unique<RunMetrics>(
      inst->consumers, inst->producer, cfg.fileChunks, cfg.payloadBytes,
      cfg.lossIncludeControl);
  if (!eventLogPath.empty()) {
    inst->logger = std::make_unique<EventLogger>(eventLogPath);
    inst->logger->meta(stack_name(cfg.stack), inst->consumers, inst->producer,
                       cfg.fileChunks, cfg.payloadBytes, cfg.seed,
                       dur::from_seconds(cfg.simDurationS),
                       cfg.lossIncludeControl);
  }

  // --- medium ---
  inst->medium = std::make_unique<Medium>(inst->sim, cfg.radio);
  RunMetrics* metrics = inst->metrics.get();
  EventLogger* log = inst->logger.get();
  inst->medium->onTxStart = [log](const Frame& f) {
    if (log) log->tx(f.txStart, f);
  };
  inst->medium->onOutcomes = [metrics, log](
                                 const Frame& f,
                                 const std::vector<ReceptionOutcome>& outs) {
    metrics->on_outcomes(f, outs);
    if (log) {
      for (const auto& o : outs) {
        if (o.status == RxStatus::Delivered)
          log->rx(f.txEnd, o.receiver, f.id, true);
        else if (o.status == RxStatus::Collided)
          log->rx(f.txEnd, o.receiver, f.id, false);
      }
    }
  };
  inst->medium->onDropBusy = [metrics, log](const Frame& f) {
    metrics->on_local_drop(f.kind, f.txStart);
    if (log) log->drop(f.txStart, f.srcNode, f.kind, f.dstNode, "busy");
  };

  // --- mobility + nodes ---
  ConvoyScript script;
  script.departAt = SimTime{dur::from_seconds(cfg.mobility.convoyDepartAtS)};
  script.awayDuration = dur::from_seconds(cfg.mobility.convoyAwayDurationS);
  script.speedMps = cfg.mobility.speedMps;
  script.heading = {0.0, 1.0};
  script.outDistanceM = cfg.mobility.convoyOutDistanceM;

  RandomWalkParams walk;
  walk.speedMps = cfg.mobility.speedMps;
  walk.legDuration = dur::from_seconds(cfg.mobility.legDurationS);
  walk.bounds = Rect{0.0, 0.0, cfg.mobility.boundsM, cfg.mobility.boundsM};

  for (int i = 0; i < cfg.nodeCount; ++i) {
    MobilityModel mob = MobilityModel::fixed(pl.pos[i]);
    if (cfg.topology == TopologyKind::ControlledGrid) {
      const bool convoyMember =
          pl.role[i] == NodeRole::MobileRouter || pl.role[i] == NodeRole::Producer;
      if (convoyMember) mob = MobilityModel::convoy(pl.pos[i], script);
    } else {
      mob = MobilityModel::random_walk(
          pl.pos[i], walk, RngStream(cfg.seed, node_stream("mobility", i)));
    }
    auto n = std::make_unique<Node>(i, pl.role[i], std::move(mob));
    n->mac = std::make_unique<Mac>(inst->sim, *inst->medium, i,
                                   RngStream(cfg.seed, node_stream("mac", i)));
    Node* np = n.get();
    n->mac->onQueueDrop = [metrics, log, np, sim = &inst->sim](
                              FrameKind kind, int bytes, int dst) {
      (void)bytes;
      metrics->on_local_drop(kind, sim->now());
      if (log) log->drop(sim->now(), np->id(), kind, dst, "queue");
    };
    inst->medium->attach(i, np);
    inst->nodes.push_back(std::move(n));
  }

  // --- stack ---
  if (cfg.stack == StackKind::Ndn)
    install_ndn(*inst);
  else
    install_olsr(*inst);

  return inst;
}

RunResult run_scenario(const ScenarioConfig& cfg, const std::string& outDir,
                       bool logEvents) {
  RunResult res;
  res.key = cfg.run_key();
  res.cfg = cfg;
  res.outDir = outDir;
  try {
    std::string logPath;
    if (!outDir.empty()) {
      fs::create_directories(outDir);
      if (logEvents) logPath = outDir + "/events.ndjson";
    }
    auto inst = build_scenario(cfg, logPath);
    inst->run_to_end();
    res.summaries = inst->metrics->summaries();
    if (!outDir.empty()) {
      std::ofstream(outDir + "/chunks.csv") << inst->metrics->chunks_csv();
      std::ofstream(outDir + "/summary.csv") << inst->metrics->summary_csv();
      std::ofstream(outDir + "/config.json") << config_to_json(cfg) << "\n";
    }
  } catch (const std::exception& e) {
    res.failed = true;
    res.error = e.what();
  }
  return res;
}

std::vector<RunResult> run_matrix(const MatrixConfig& m,
                                  const std::string& outDir, int jobs,
                                  bool logEvents) {
  std::vector<ScenarioConfig> cfgs;
  for (StackKind stack : m.stacks) {
    for (double start : m.consumer2Starts) {
      for (std::uint64_t seed : m.seeds) {
        ScenarioConfig c = m.base;
        c.stack = stack;
        c.consumer2StartS = start;
        c.seed = seed;
        cfgs.push_back(c);
      }
    }
  }

  std::vector<RunResult> results(cfgs.size());
  std::mutex mx;
  std::size_t nextIdx = 0;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lk(mx);
        if (nextIdx >= cfgs.size()) return;
        i = nextIdx++;
      }
      const std::string runDir =
          outDir.empty() ? "" : outDir + "/run_" + cfgs[i].run_key();
      results[i] = run_scenario(cfgs[i], runDir, logEvents);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (!outDir.empty()) {
    fs::create_directories(outDir);
    std::ofstream(outDir + "/aggregate.csv") << aggregate_csv(results);
    std::ofstream(outDir + "/manifest.json") << manifest_json(m, results);
    std::ofstream(outDir + "/plot.py") << plot_script();
  }
  return results;
}

std::string aggregate_csv(const std::vector<RunResult>& runs) {
  // (topology, stack, start, policy, consumer, metric) -> per-seed values
  std::map<std::tuple<std::string, std::string, double, std::string, int,
                      std::string>,
           std::vector<double>>
      cells;
  for (const auto& r : runs) {
    if (r.failed) continue;
    const std::string topo = topology_name(r.cfg.topology);
    const std::string stack = stack_name(r.cfg.stack);
    const std::string policy =
        r.cfg.ndn.cachePolicy == CachePolicy::Lru ? "lru" : "plru";
    for (const auto& s : r.summaries) {
      const auto put = [&](const char* metric, double v) {
        cells[{topo, stack, r.cfg.consumer2StartS, policy, s.consumer, metric}]
            .push_back(v);
      };
      put("meanDelayS", s.meanDelayS);
      put("meanHopCount", s.meanHopCount);
      put("meanTxAttempts", s.meanTxAttempts);
      put("totalRetries", static_cast<double>(s.totalRetries));
      put("goodputBps", s.goodputBps);
      put("lossRate", s.lossRate);
      put("completionFraction", s.completionFraction);
    }
  }
  std::string out =
      "topology,stack,consumer2StartS,cachePolicy,consumer,metric,mean,min,"
      "max,nRuns\n";
  for (const auto& [key, values] : cells) {
    const SeedAggregate a = aggregate_seeds(values);
    const auto& [topo, stack, start, policy, consumer, metric] = key;
    out += topo + ',' + stack + ',' + format_double(start) + ',' + policy +
           ',' + std::to_string(consumer) + ',' + metric + ',' +
           format_double(a.mean) + ',' + format_double(a.min) + ',' +
           format_double(a.max) + ',' + std::to_string(a.nRuns) + '\n';
  }
  return out;
}

std::string manifest_json(const MatrixConfig& m,
                          const std::vector<RunResult>& runs) {
  nlohmann::json j;
  j["prng"] = {{"algorithm", std::string(RngStream::algorithm())},
               {"seeding", std::string(RngStream::seeding())}};
  j["base"] = nlohmann::json::parse(config_to_json(m.base));
  nlohmann::json stacks = nlohmann::json::array();
  for (auto s : m.stacks) stacks.push_back(stack_name(s));
  j["stacks"] = stacks;
  j["consumer2StartS"] = m.consumer2Starts;
  j["seeds"] = m.seeds;
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : runs) {
    nlohmann::json rj;
    rj["key"] = r.key;
    rj["status"] = r.failed ? "failed" : "ok";
    if (r.failed) rj["error"] = r.error;
    if (!r.outDir.empty()) rj["outDir"] = r.outDir;
    rj["config"] = nlohmann::json::parse(config_to_json(r.cfg));
    rs.push_back(rj);
  }
  j["runs"] = rs;
  return j.dump(2);
}

}  // namespace dilsim
