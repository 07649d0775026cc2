#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "dilsim/content_store.hpp"
#include "dilsim/packets.hpp"
#include "dilsim/radio.hpp"
#include "dilsim/rng.hpp"
#include "dilsim/rtt.hpp"
#include "dilsim/sim.hpp"

namespace dilsim {

struct StrategyConfig {
  int deferWindow{127};  // rebroadcast delay: uniform integer slots in [0, DW)
  Duration pitLifetime{dur::millis(700)};
  int interestPayloadBytes{40};
};

enum class InterestAction {
  CacheReply,   // served from CS/producer, no PIT entry
  LocalReply,   // local request satisfied from own store
  Aggregated,   // PIT hit, forwarding suppressed
  Forwarded,    // PIT entry created (or local retransmission), send scheduled
  Duplicate,    // (name, nonce) seen before
  Malformed,
};

enum class DataAction { Unsolicited, Accepted };

/// Broadcast forwarding plane of one node: PIT with Interest aggregation,
/// Content Store offer on Data, and timer-based controlled flooding. Every
/// forward waits a random number of slots in [0, deferWindow) and is dropped
/// if the same packet is overheard first, including while it still sits in
/// the MAC queue.
class NdnForwarder {
 public:
  NdnForwarder(Simulator& sim, Mac& mac, ContentStore& cs, StrategyConfig cfg,
               Duration slotTime, RngStream defer, RngStream cacheCoin,
               int node);

  /// Producer hook: non-null result answers the Interest with fresh content.
  std::function<std::optional<DataPkt>(const Interest&)> contentSource;
  /// Consumer hook: fires when a locally expressed Interest is satisfied.
  std::function<void(const DataPkt&)> localDelivery;
  /// Channel-sense hook: a defer that expires while this is true redraws a
  /// fresh defer instead of queueing at the busy edge, so hidden forwarders
  /// released by the same foreign frame decorrelate.
  std::function<bool()> channelBusy;

  InterestAction on_interest(const Interest& interest, bool fromLocal);
  DataAction on_data(const DataPkt& data);

  /// Wire to Mac::onSent so pending-send state clears once frames hit the air.
  void handle_frame_sent(std::uint64_t token);

  bool has_pit_entry(const Name& name) const;
  std::size_t pit_size() const { return pit_.size(); }
  int protocol_errors() const { return protocolErrors_; }
  ContentStore& store() { return cs_; }

 private:
  struct PitEntry {
    std::set<std::uint32_t> nonces;
    bool forwardedUpstream{false};  // an Interest for this name hit the air
    EventHandle expiryEv;
    // pending upstream rebroadcast
    bool pendingForward{false};
    Interest pendingInterest;
    EventHandle deferEv;
    std::uint64_t macToken{0};
  };
  struct PendingData {
    EventHandle deferEv;
    std::uint64_t macToken{0};
  };

  Duration draw_defer();
  void schedule_interest_forward(const std::string& key, const Interest& in);
  void fire_interest(const std::string& key);
  void schedule_data_send(const std::string& key, const DataPkt& d);
  void fire_data(const std::string& key, const DataPkt& d);
  void cancel_pending_interest(PitEntry& e);
  void arm_pit_expiry(const std::string& key);

  Simulator& sim_;
  Mac& mac_;
  ContentStore& cs_;
  StrategyConfig cfg_;
  Duration slotTime_;
  RngStream defer_;
  RngStream coin_;
  int node_;

  std::map<std::string, PitEntry> pit_;
  std::map<std::string, PendingData> pendingData_;
  std::unordered_map<std::string, std::unordered_set<std::uint32_t>> seen_;
  std::unordered_map<std::uint64_t, std::pair<bool, std::string>> tokenKeys_;
  int protocolErrors_{0};
};

struct ConsumerParams {
  std::string prefix{"/test/content"};
  std::uint32_t fileChunks{1000};
  int window{12};
  Duration initialRto{dur::seconds(2)};
  Duration minRto{dur::millis(500)};
  Duration maxRto{dur::seconds(60)};
};

/// Batch consumer: keeps `window` Interests outstanding, paces
/// retransmissions with the RTT estimator, fresh nonce per attempt.
class ConsumerApp {
 public:
  ConsumerApp(Simulator& sim, NdnForwarder& fw, ConsumerParams params,
              RngStream nonceRng, int node, SimTime startAt);

  void start();
  void on_chunk(const DataPkt& d);  // wire to forwarder.localDelivery

  std::function<void(std::uint32_t chunk, int attempt)> onExpressed;
  std::function<void(std::uint32_t chunk, const DataPkt& d, int attempts,
                     SimTime firstExpressed)>
      onDelivered;

  std::size_t chunks_delivered() const { return delivered_; }
  bool complete() const { return delivered_ == params_.fileChunks; }
  const RttEstimator& rtt() const { return rtt_; }
  int node() const { return node_; }

 private:
  struct Outstanding {
    int attempts{0};
    SimTime firstExpressed{};
    SimTime lastExpressed{};
    EventHandle timer;
  };

  void fill_window();
  void express(std::uint32_t chunk);
  void on_timeout(std::uint32_t chunk);
  Duration pacing_gap() const;

  Simulator& sim_;
  NdnForwarder& fw_;
  ConsumerParams params_;
  RngStream nonce_;
  int node_;
  SimTime startAt_;
  RttEstimator rtt_;
  std::map<std::uint32_t, Outstanding> outstanding_;
  std::uint32_t next_{0};
  std::size_t delivered_{0};
  SimTime nextExpressionAt_{};
};

/// Permanent origin of the content under one prefix.
class ProducerApp {
 public:
  ProducerApp(std::string prefix, std::uint32_t chunks, int payloadBytes,
              int node)
      : prefix_(std::move(prefix)), chunks_(chunks),
        payloadBytes_(payloadBytes), node_(node) {}

  std::optional<DataPkt> serve(const Interest& interest) const {
    if (interest.name.prefix != prefix_) return std::nullopt;
    if (interest.name.chunk >= chunks_) return std::nullopt;
    return DataPkt{interest.name, payloadBytes_, 0, node_};
  }

 private:
  std::string prefix_;
  std::uint32_t chunks_;
  int payloadBytes_;
  int node_;
};

}  // namespace dilsim
