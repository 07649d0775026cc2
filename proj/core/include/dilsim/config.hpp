#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dilsim/content_store.hpp"
#include "dilsim/radio.hpp"

namespace dilsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StackKind { Ndn, OlsrTcp, OlsrUdp };
enum class TopologyKind { ControlledGrid, RandomWalk };
enum class PlruScope { FixedNodesOnly, AllMobileNodes };

std::string stack_name(StackKind s);
StackKind stack_from_name(const std::string& s);
std::string topology_name(TopologyKind t);

struct MobilityCfg {
  double speedMps{6.0};
  double boundsM{500.0};       // random walk square side
  double legDurationS{2.0};    // random walk heading change period
  double gridSpacingM{100.0};  // controlled grid spacing
  double convoyDepartAtS{60.0};
  double convoyOutDistanceM{120.0};
  double convoyAwayDurationS{30.0};
};

struct NdnCfg {
  int deferWindow{127};
  double pitLifetimeS{0.7};
  int csCapacity{100};
  CachePolicy cachePolicy{CachePolicy::Lru};
  double plruP{0.5};
  PlruScope plruScope{PlruScope::FixedNodesOnly};
  int window{12};
  double initialRtoS{2.0};
  double minRtoS{0.5};
  double maxRtoS{60.0};
  int interestPayloadBytes{40};
};

struct OlsrCfgKeys {
  double helloIntervalS{2.0};
  double tcIntervalS{5.0};
  double neighborHoldS{6.0};
  double topologyHoldS{15.0};
  double maxJitterS{0.5};
};

struct TransportCfg {
  std::int64_t crRateBps{200'000};
  double initialRtoS{1.0};
  double minRtoS{0.5};
  double maxRtoS{60.0};
  double initialSsthresh{64.0};
};

/// Fully resolved run configuration. Field defaults ARE the preset values
/// (Table-1 style parameters); presets pin the topology and scenario shape,
/// explicit keys override, unknown keys are rejected with their path.
struct ScenarioConfig {
  std::string preset;  // "", "controlledGrid", "randomWalk"
  StackKind stack{StackKind::Ndn};
  TopologyKind topology{TopologyKind::ControlledGrid};
  int nodeCount{21};
  std::uint64_t seed{1};
  double consumer2StartS{5.0};
  double simDurationS{400.0};
  std::string contentPrefix{"/test/content"};
  std::uint32_t fileChunks{1000};
  int payloadBytes{1040};
  bool lossIncludeControl{false};
  RadioConfig radio{};
  MobilityCfg mobility{};
  NdnCfg ndn{};
  OlsrCfgKeys olsr{};
  TransportCfg transport{};

  std::string run_key() const;
};

ScenarioConfig parse_config(const std::string& jsonText);
ScenarioConfig parse_config_file(const std::string& path);
void validate_config(const ScenarioConfig& cfg);

/// Resolved config serialized back out with every applied default visible.
std::string config_to_json(const ScenarioConfig& cfg);

struct MatrixConfig {
  ScenarioConfig base;
  std::vector<StackKind> stacks;
  std::vector<double> consumer2Starts;
  std::vector<std::uint64_t> seeds;
};

MatrixConfig parse_matrix(const std::string& jsonText);
MatrixConfig parse_matrix_file(const std::string& path);

/// Range at which the received power crosses the sensitivity threshold.
double sensitivity_range_m(const RadioConfig& radio);

}  // namespace dilsim
