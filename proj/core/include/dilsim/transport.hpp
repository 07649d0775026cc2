#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "dilsim/packets.hpp"
#include "dilsim/rtt.hpp"
#include "dilsim/sim.hpp"

namespace dilsim {

/// Reno congestion-control rules, isolated for direct testing:
/// slow start below ssthresh, +1/cwnd above, halving on loss signals.
struct RenoState {
  double cwnd{1.0};
  double ssthresh{64.0};

  void on_new_ack() { cwnd += (cwnd < ssthresh) ? 1.0 : 1.0 / cwnd; }
  void on_timeout() {
    ssthresh = std::max(cwnd / 2.0, 2.0);
    cwnd = 1.0;
  }
  void on_triple_dup() {
    ssthresh = std::max(cwnd / 2.0, 2.0);
    cwnd = ssthresh;
  }
  int window() const { return static_cast<int>(cwnd); }
};

struct ReliableParams {
  int totalSegments{1000};
  int segmentBytes{1040};
  Duration initialRto{dur::seconds(1)};
  Duration minRto{dur::millis(200)};
  Duration maxRto{dur::seconds(60)};
};

/// Windowed reliable sender (producer side). Loses nothing of its own: every
/// gap is repaired by timeout or fast retransmit. A send attempt with no
/// route simply stays unacked and retries on the timer, which is how a
/// partition stalls the flow.
class ReliableSender {
 public:
  ReliableSender(Simulator& sim, ReliableParams params, int flowId,
                 int srcNode, int dstNode, SimTime startAt);

  /// Returns false when there is no route (segment not aired).
  std::function<bool(const Segment&)> sendSegment;
  std::function<void(std::uint32_t seq, int attempt)> onSegmentSent;

  void start();
  void on_ack(const Segment& ack);

  bool complete() const {
    return sndUna_ >= static_cast<std::uint32_t>(params_.totalSegments);
  }
  const RenoState& reno() const { return reno_; }
  const RttEstimator& rtt() const { return rtt_; }

 private:
  void try_send();
  void send_one(std::uint32_t seq);
  void arm_timer();
  void on_timer();

  Simulator& sim_;
  ReliableParams params_;
  int flowId_;
  int srcNode_;
  int dstNode_;
  SimTime startAt_;

  RenoState reno_;
  RttEstimator rtt_;
  std::uint32_t sndUna_{0};
  std::uint32_t nextSeq_{0};
  int dupAcks_{0};
  EventHandle timer_;
  bool timerArmed_{false};

  struct SegState {
    int attempts{0};
    SimTime lastSent{};
  };
  std::map<std::uint32_t, SegState> segs_;
};

/// Receiver side shared by both transports: deduplicates, tracks the
/// in-order delivery frontier, and (for the reliable flow) returns a
/// cumulative ACK for every arriving data segment.
class FlowReceiver {
 public:
  FlowReceiver(int flowId, int node, int totalSegments, bool sendAcks);

  std::function<bool(const Segment&)> sendSegment;  // ACK path
  std::function<void(std::uint32_t seq, const Segment& s)> onNewSegment;

  void on_segment(const Segment& s);

  std::uint32_t next_expected() const { return nextExpected_; }
  std::size_t unique_segments() const { return unique_; }
  bool complete() const { return unique_ == got_.size(); }

 private:
  int flowId_;
  int node_;
  bool sendAcks_;
  std::vector<bool> got_;
  std::uint32_t nextExpected_{0};
  std::size_t unique_{0};
};

struct ConstantRateParams {
  int totalSegments{1000};
  int segmentBytes{1040};
  std::int64_t rateBps{200'000};
};

/// Open-loop sender: fixed inter-segment spacing, never adapts, no
/// retransmissions. Sends into the void when no route exists.
class ConstantRateSender {
 public:
  ConstantRateSender(Simulator& sim, ConstantRateParams params, int flowId,
                     int srcNode, int dstNode, SimTime startAt);

  std::function<bool(const Segment&)> sendSegment;
  std::function<void(std::uint32_t seq, int attempt)> onSegmentSent;

  void start();
  Duration gap() const;

 private:
  void tick();

  Simulator& sim_;
  ConstantRateParams params_;
  int flowId_;
  int srcNode_;
  int dstNode_;
  SimTime startAt_;
  std::uint32_t next_{0};
};

}  // namespace dilsim
