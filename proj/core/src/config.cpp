#include "dilsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dilsim {

using nlohmann::json;

std::string stack_name(StackKind s) {
  switch (s) {
    case StackKind::Ndn: return "ndn";
    case StackKind::OlsrTcp: return "olsr-tcp";
    case StackKind::OlsrUdp: return "olsr-udp";
  }
  return "?";
}

StackKind stack_from_name(const std::string& s) {
  if (s == "ndn") return StackKind::Ndn;
  if (s == "olsr-tcp") return StackKind::OlsrTcp;
  if (s == "olsr-udp") return StackKind::OlsrUdp;
  throw ConfigError("stack: expected ndn | olsr-tcp | olsr-udp, got '" + s +
                    "'");
}

std::string topology_name(TopologyKind t) {
  return t == TopologyKind::ControlledGrid ? "controlledGrid" : "randomWalk";
}

namespace {

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown config key: " +
                        (path.empty() ? it.key() : path + "." + it.key()));
  }
}

template <typename T>
void get_to(const json& obj, const std::string& path, const char* key,
            T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    it->get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError("bad value for " +
                      (path.empty() ? std::string(key) : path + "." + key) +
                      ": " + e.what());
  }
}

void parse_radio(const json& j, RadioConfig& r) {
  check_keys(j, "radio",
             {"txPowerDbm", "rxSensitivityDbm", "channelBps", "carrierFreqHz",
              "systemLossDb", "slotTimeUs", "preambleUs", "macHeaderBytes",
              "macQueueCap", "backoffSlots"});
  get_to(j, "radio", "txPowerDbm", r.txPowerDbm);
  get_to(j, "radio", "rxSensitivityDbm", r.rxSensitivityDbm);
  get_to(j, "radio", "channelBps", r.channelBps);
  get_to(j, "radio", "carrierFreqHz", r.carrierFreqHz);
  get_to(j, "radio", "systemLossDb", r.systemLossDb);
  double slotUs = static_cast<double>(r.slotTime) / 1e3;
  double preUs = static_cast<double>(r.preambleTime) / 1e3;
  get_to(j, "radio", "slotTimeUs", slotUs);
  get_to(j, "radio", "preambleUs", preUs);
  r.slotTime = static_cast<Duration>(std::llround(slotUs * 1e3));
  r.preambleTime = static_cast<Duration>(std::llround(preUs * 1e3));
  get_to(j, "radio", "macHeaderBytes", r.macHeaderBytes);
  get_to(j, "radio", "macQueueCap", r.macQueueCap);
  get_to(j, "radio", "backoffSlots", r.backoffSlots);
}

void parse_mobility(const json& j, MobilityCfg& m) {
  check_keys(j, "mobility",
             {"speedMps", "boundsM", "legDurationS", "gridSpacingM", "convoy"});
  get_to(j, "mobility", "speedMps", m.speedMps);
  get_to(j, "mobility", "boundsM", m.boundsM);
  get_to(j, "mobility", "legDurationS", m.legDurationS);
  get_to(j, "mobility", "gridSpacingM", m.gridSpacingM);
  if (auto it = j.find("convoy"); it != j.end()) {
    check_keys(*it, "mobility.convoy",
               {"departAtS", "outDistanceM", "awayDurationS"});
    get_to(*it, "mobility.convoy", "departAtS", m.convoyDepartAtS);
    get_to(*it, "mobility.convoy", "outDistanceM", m.convoyOutDistanceM);
    get_to(*it, "mobility.convoy", "awayDurationS", m.convoyAwayDurationS);
  }
}

void parse_ndn(const json& j, NdnCfg& n) {
  check_keys(j, "ndn",
             {"deferWindow", "pitLifetimeS", "csCapacity", "cachePolicy",
              "plruP", "plruScope", "window", "initialRtoS", "minRtoS",
              "maxRtoS", "interestPayloadBytes"});
  get_to(j, "ndn", "deferWindow", n.deferWindow);
  get_to(j, "ndn", "pitLifetimeS", n.pitLifetimeS);
  get_to(j, "ndn", "csCapacity", n.csCapacity);
  if (auto it = j.find("cachePolicy"); it != j.end()) {
    const std::string p = it->get<std::string>();
    if (p == "lru")
      n.cachePolicy = CachePolicy::Lru;
    else if (p == "plru")
      n.cachePolicy = CachePolicy::Plru;
    else
      throw ConfigError("ndn.cachePolicy: expected lru | plru, got '" + p +
                        "'");
  }
  get_to(j, "ndn", "plruP", n.plruP);
  if (auto it = j.find("plruScope"); it != j.end()) {
    const std::string s = it->get<std::string>();
    if (s == "fixedNodesOnly")
      n.plruScope = PlruScope::FixedNodesOnly;
    else if (s == "allMobileNodes")
      n.plruScope = PlruScope::AllMobileNodes;
    else
      throw ConfigError(
          "ndn.plruScope: expected fixedNodesOnly | allMobileNodes, got '" +
          s + "'");
  }
  get_to(j, "ndn", "window", n.window);
  get_to(j, "ndn", "initialRtoS", n.initialRtoS);
  get_to(j, "ndn", "minRtoS", n.minRtoS);
  get_to(j, "ndn", "maxRtoS", n.maxRtoS);
  get_to(j, "ndn", "interestPayloadBytes", n.interestPayloadBytes);
}

void parse_olsr(const json& j, OlsrCfgKeys& o) {
  check_keys(j, "olsr",
             {"helloIntervalS", "tcIntervalS", "neighborHoldS",
              "topologyHoldS", "maxJitterS"});
  get_to(j, "olsr", "helloIntervalS", o.helloIntervalS);
  get_to(j, "olsr", "tcIntervalS", o.tcIntervalS);
  get_to(j, "olsr", "neighborHoldS", o.neighborHoldS);
  get_to(j, "olsr", "topologyHoldS", o.topologyHoldS);
  get_to(j, "olsr", "maxJitterS", o.maxJitterS);
}

void parse_transport(const json& j, TransportCfg& t) {
  check_keys(j, "transport",
             {"crRateBps", "initialRtoS", "minRtoS", "maxRtoS",
              "initialSsthresh"});
  get_to(j, "transport", "crRateBps", t.crRateBps);
  get_to(j, "transport", "initialRtoS", t.initialRtoS);
  get_to(j, "transport", "minRtoS", t.minRtoS);
  get_to(j, "transport", "maxRtoS", t.maxRtoS);
  get_to(j, "transport", "initialSsthresh", t.initialSsthresh);
}

const std::set<std::string> kTopKeys = {
    "preset",       "stack",           "topology",
    "nodeCount",    "seed",            "consumer2StartS",
    "simDurationS", "contentPrefix",   "fileChunks",
    "payloadBytes", "lossIncludeControl", "radio",
    "mobility",     "ndn",             "olsr",
    "transport"};

ScenarioConfig parse_config_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(j, "", kTopKeys);

  ScenarioConfig cfg;
  get_to(j, "", "preset", cfg.preset);
  if (!cfg.preset.empty()) {
    if (cfg.preset == "controlledGrid") {
      cfg.topology = TopologyKind::ControlledGrid;
      cfg.simDurationS = 400.0;
      cfg.consumer2StartS = 5.0;
    } else if (cfg.preset == "randomWalk") {
      cfg.topology = TopologyKind::RandomWalk;
      cfg.simDurationS = 300.0;
      cfg.consumer2StartS = 0.0;
    } else {
      throw ConfigError("preset: expected controlledGrid | randomWalk, got '" +
                        cfg.preset + "'");
    }
  }
  if (auto it = j.find("stack"); it != j.end())
    cfg.stack = stack_from_name(it->get<std::string>());
  if (auto it = j.find("topology"); it != j.end()) {
    const std::string t = it->get<std::string>();
    if (t == "controlledGrid")
      cfg.topology = TopologyKind::ControlledGrid;
    else if (t == "randomWalk")
      cfg.topology = TopologyKind::RandomWalk;
    else
      throw ConfigError(
          "topology: expected controlledGrid | randomWalk, got '" + t + "'");
  }
  get_to(j, "", "nodeCount", cfg.nodeCount);
  get_to(j, "", "seed", cfg.seed);
  get_to(j, "", "consumer2StartS", cfg.consumer2StartS);
  get_to(j, "", "simDurationS", cfg.simDurationS);
  get_to(j, "", "contentPrefix", cfg.contentPrefix);
  get_to(j, "", "fileChunks", cfg.fileChunks);
  get_to(j, "", "payloadBytes", cfg.payloadBytes);
  get_to(j, "", "lossIncludeControl", cfg.lossIncludeControl);
  if (auto it = j.find("radio"); it != j.end()) parse_radio(*it, cfg.radio);
  if (auto it = j.find("mobility"); it != j.end())
    parse_mobility(*it, cfg.mobility);
  if (auto it = j.find("ndn"); it != j.end()) parse_ndn(*it, cfg.ndn);
  if (auto it = j.find("olsr"); it != j.end()) parse_olsr(*it, cfg.olsr);
  if (auto it = j.find("transport"); it != j.end())
    parse_transport(*it, cfg.transport);

  validate_config(cfg);
  return cfg;
}

}  // namespace

double sensitivity_range_m(const RadioConfig& radio) {
  const double budgetDb =
      radio.txPowerDbm - radio.systemLossDb - radio.rxSensitivityDbm;
  return 299792458.0 / (4.0 * M_PI * radio.carrierFreqHz) *
         std::pow(10.0, budgetDb / 20.0);
}

void validate_config(const ScenarioConfig& cfg) {
  const auto bad = [](const std::string& msg) { throw ConfigError(msg); };
  if (cfg.nodeCount < 3) bad("nodeCount: need at least 3 nodes");
  if (cfg.simDurationS <= 0) bad("simDurationS: must be > 0");
  if (cfg.consumer2StartS < 0) bad("consumer2StartS: must be >= 0");
  if (cfg.fileChunks == 0) bad("fileChunks: must be > 0");
  if (cfg.payloadBytes <= 0) bad("payloadBytes: must be > 0");
  if (cfg.contentPrefix.empty() || cfg.contentPrefix[0] != '/')
    bad("contentPrefix: must start with '/'");
  if (cfg.radio.channelBps <= 0) bad("radio.channelBps: must be > 0");
  if (cfg.radio.slotTime <= 0) bad("radio.slotTimeUs: must be > 0");
  if (cfg.radio.systemLossDb < 0) bad("radio.systemLossDb: must be >= 0");
  if (cfg.radio.macQueueCap <= 0) bad("radio.macQueueCap: must be > 0");
  if (cfg.radio.backoffSlots <= 0) bad("radio.backoffSlots: must be > 0");
  if (cfg.mobility.speedMps <= 0) bad("mobility.speedMps: must be > 0");
  if (cfg.mobility.boundsM <= 0) bad("mobility.boundsM: must be > 0");
  if (cfg.mobility.legDurationS <= 0) bad("mobility.legDurationS: must be > 0");
  if (cfg.mobility.gridSpacingM <= 0) bad("mobility.gridSpacingM: must be > 0");
  if (cfg.ndn.deferWindow < 1) bad("ndn.deferWindow: must be >= 1");
  if (cfg.ndn.csCapacity <= 0) bad("ndn.csCapacity: must be > 0");
  if (cfg.ndn.plruP < 0 || cfg.ndn.plruP > 1)
    bad("ndn.plruP: must be in [0,1]");
  if (cfg.ndn.window < 1) bad("ndn.window: must be >= 1");
  if (cfg.transport.crRateBps <= 0) bad("transport.crRateBps: must be > 0");

  if (cfg.preset == "controlledGrid") {
    const std::set<double> allowed = {5, 10, 50, 100, 200};
    if (!allowed.count(cfg.consumer2StartS))
      bad("consumer2StartS: controlledGrid preset allows {5,10,50,100,200}; "
          "drop the preset key for free-form values");
    if (cfg.nodeCount != 21)
      bad("nodeCount: controlledGrid preset requires 21 nodes");
  }
  if (cfg.preset == "randomWalk") {
    const std::set<double> allowed = {0, 10, 100};
    if (!allowed.count(cfg.consumer2StartS))
      bad("consumer2StartS: randomWalk preset allows {0,10,100}; drop the "
          "preset key for free-form values");
  }
}

ScenarioConfig parse_config(const std::string& jsonText) {
  json j;
  try {
    j = json::parse(jsonText);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string ScenarioConfig::run_key() const {
  std::string key = topology_name(topology) + "_" + stack_name(stack);
  std::ostringstream start;
  start << consumer2StartS;
  key += "_start" + start.str() + "_seed" + std::to_string(seed);
  return key;
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["preset"] = cfg.preset;
  j["stack"] = stack_name(cfg.stack);
  j["topology"] = topology_name(cfg.topology);
  j["nodeCount"] = cfg.nodeCount;
  j["seed"] = cfg.seed;
  j["consumer2StartS"] = cfg.consumer2StartS;
  j["simDurationS"] = cfg.simDurationS;
  j["contentPrefix"] = cfg.contentPrefix;
  j["fileChunks"] = cfg.fileChunks;
  j["payloadBytes"] = cfg.payloadBytes;
  j["lossIncludeControl"] = cfg.lossIncludeControl;
  j["radio"] = {{"txPowerDbm", cfg.radio.txPowerDbm},
                {"rxSensitivityDbm", cfg.radio.rxSensitivityDbm},
                {"channelBps", cfg.radio.channelBps},
                {"carrierFreqHz", cfg.radio.carrierFreqHz},
                {"systemLossDb", cfg.radio.systemLossDb},
                {"slotTimeUs", static_cast<double>(cfg.radio.slotTime) / 1e3},
                {"preambleUs",
                 static_cast<double>(cfg.radio.preambleTime) / 1e3},
                {"macHeaderBytes", cfg.radio.macHeaderBytes},
                {"macQueueCap", cfg.radio.macQueueCap},
                {"backoffSlots", cfg.radio.backoffSlots}};
  j["mobility"] = {{"speedMps", cfg.mobility.speedMps},
                   {"boundsM", cfg.mobility.boundsM},
                   {"legDurationS", cfg.mobility.legDurationS},
                   {"gridSpacingM", cfg.mobility.gridSpacingM},
                   {"convoy",
                    {{"departAtS", cfg.mobility.convoyDepartAtS},
                     {"outDistanceM", cfg.mobility.convoyOutDistanceM},
                     {"awayDurationS", cfg.mobility.convoyAwayDurationS}}}};
  j["ndn"] = {{"deferWindow", cfg.ndn.deferWindow},
              {"pitLifetimeS", cfg.ndn.pitLifetimeS},
              {"csCapacity", cfg.ndn.csCapacity},
              {"cachePolicy",
               cfg.ndn.cachePolicy == CachePolicy::Lru ? "lru" : "plru"},
              {"plruP", cfg.ndn.plruP},
              {"plruScope", cfg.ndn.plruScope == PlruScope::FixedNodesOnly
                                ? "fixedNodesOnly"
                                : "allMobileNodes"},
              {"window", cfg.ndn.window},
              {"initialRtoS", cfg.ndn.initialRtoS},
              {"minRtoS", cfg.ndn.minRtoS},
              {"maxRtoS", cfg.ndn.maxRtoS},
              {"interestPayloadBytes", cfg.ndn.interestPayloadBytes}};
  j["olsr"] = {{"helloIntervalS", cfg.olsr.helloIntervalS},
               {"tcIntervalS", cfg.olsr.tcIntervalS},
               {"neighborHoldS", cfg.olsr.neighborHoldS},
               {"topologyHoldS", cfg.olsr.topologyHoldS},
               {"maxJitterS", cfg.olsr.maxJitterS}};
  j["transport"] = {{"crRateBps", cfg.transport.crRateBps},
                    {"initialRtoS", cfg.transport.initialRtoS},
                    {"minRtoS", cfg.transport.minRtoS},
                    {"maxRtoS", cfg.transport.maxRtoS},
                    {"initialSsthresh", cfg.transport.initialSsthresh}};
  return j.dump(2);
}

MatrixConfig parse_matrix(const std::string& jsonText) {
  json j;
  try {
    j = json::parse(jsonText);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("matrix is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("matrix root must be a JSON object");
  check_keys(j, "", {"base", "stacks", "consumer2StartS", "seeds"});
  MatrixConfig m;
  if (auto it = j.find("base"); it != j.end())
    m.base = parse_config_json(*it);
  if (auto it = j.find("stacks"); it != j.end()) {
    for (const auto& s : *it) m.stacks.push_back(stack_from_name(s));
  } else {
    m.stacks = {m.base.stack};
  }
  if (auto it = j.find("consumer2StartS"); it != j.end()) {
    for (const auto& v : *it) m.consumer2Starts.push_back(v.get<double>());
  } else {
    m.consumer2Starts = {m.base.consumer2StartS};
  }
  if (auto it = j.find("seeds"); it != j.end()) {
    for (const auto& v : *it) m.seeds.push_back(v.get<std::uint64_t>());
  } else {
    m.seeds = {1, 2, 3, 4, 5};
  }
  if (m.seeds.empty() || m.stacks.empty() || m.consumer2Starts.empty())
    throw ConfigError("matrix: stacks/consumer2StartS/seeds must be nonempty");
  return m;
}

MatrixConfig parse_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str());
}

}  // namespace dilsim
