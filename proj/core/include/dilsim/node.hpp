#pragma once

#include <functional>
#include <map>
#include <memory>

#include "dilsim/mobility.hpp"
#include "dilsim/ndn.hpp"
#include "dilsim/olsr.hpp"
#include "dilsim/radio.hpp"
#include "dilsim/transport.hpp"

namespace dilsim {

enum class NodeRole { Consumer, FixedRouter, MobileRouter, Producer };

/// One simulated station: mobility + MAC + exactly one protocol stack.
/// Frame dispatch happens here; the scenario wires the per-run hooks.
class Node : public MediumClient {
 public:
  Node(int id, NodeRole role, MobilityModel mobility)
      : id_(id), role_(role), mobility_(std::move(mobility)) {}

  Vec2 radio_position(SimTime t) override { return mobility_.position_at(t); }
  void frame_delivered(const Frame& f) override;

  /// Unicast send along the current route table; false when no route.
  bool send_segment(const Segment& s);

  int id() const { return id_; }
  NodeRole role() const { return role_; }
  MobilityModel& mobility() { return mobility_; }

  std::unique_ptr<Mac> mac;

  // NDN stack
  std::unique_ptr<ContentStore> cs;
  std::unique_ptr<NdnForwarder> forwarder;
  std::unique_ptr<ConsumerApp> consumerApp;
  std::unique_ptr<ProducerApp> producerApp;

  // routed stack
  std::unique_ptr<OlsrNode> olsr;
  std::map<int, std::unique_ptr<ReliableSender>> senders;    // by flow id
  std::map<int, std::unique_ptr<ConstantRateSender>> crSenders;
  std::unique_ptr<FlowReceiver> flowReceiver;

  /// Fired when a segment had no route or ran out of TTL (local drop).
  std::function<void(const Segment&, const char* why)> onSegmentDrop;

 private:
  int id_;
  NodeRole role_;
  MobilityModel mobility_;
};

}  // namespace dilsim
