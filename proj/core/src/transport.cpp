#include "dilsim/transport.hpp"

namespace dilsim {

namespace {
constexpr int kDataTtl = 32;
}

ReliableSender::ReliableSender(Simulator& sim, ReliableParams params,
                               int flowId, int srcNode, int dstNode,
                               SimTime startAt)
    : sim_(sim), params_(params), flowId_(flowId), srcNode_(srcNode),
      dstNode_(dstNode), startAt_(startAt),
      rtt_(params.initialRto, params.minRto, params.maxRto) {}

void ReliableSender::start() {
  sim_.schedule_at(startAt_, [this] { try_send(); });
}

void ReliableSender::try_send() {
  while (nextSeq_ < static_cast<std::uint32_t>(params_.totalSegments) &&
         nextSeq_ - sndUna_ < static_cast<std::uint32_t>(reno_.window())) {
    send_one(nextSeq_++);
  }
}

void ReliableSender::send_one(std::uint32_t seq) {
  SegState& st = segs_[seq];
  ++st.attempts;
  st.lastSent = sim_.now();
  if (onSegmentSent) onSegmentSent(seq, st.attempts);

  Segment s;
  s.flowId = flowId_;
  s.srcNode = srcNode_;
  s.dstNode = dstNode_;
  s.seq = seq;
  s.payloadBytes = params_.segmentBytes;
  s.ttl = kDataTtl;
  if (sendSegment) sendSegment(s);  // false = no route; timer will retry
  arm_timer();
}

void ReliableSender::arm_timer() {
  if (timerArmed_) sim_.cancel(timer_);
  timerArmed_ = true;
  timer_ = sim_.schedule(rtt_.rto(), [this] { on_timer(); });
}

void ReliableSender::on_timer() {
  timerArmed_ = false;
  if (complete() || sndUna_ >= nextSeq_) return;
  reno_.on_timeout();
  rtt_.on_timeout();
  dupAcks_ = 0;
  send_one(sndUna_);
}

void ReliableSender::on_ack(const Segment& ack) {
  if (ack.flowId != flowId_ || !ack.isAck) return;
  const std::uint32_t ackUpTo = ack.ackUpTo;
  if (ackUpTo > sndUna_) {
    // RTT sample from the highest newly acked, first-transmission segment.
    const std::uint32_t sampled = ackUpTo - 1;
    if (auto it = segs_.find(sampled);
        it != segs_.end() && it->second.attempts == 1)
      rtt_.add_sample(sim_.now() - it->second.lastSent);
    for (std::uint32_t s = sndUna_; s < ackUpTo; ++s) segs_.erase(s);
    sndUna_ = ackUpTo;
    dupAcks_ = 0;
    reno_.on_new_ack();
    if (complete()) {
      if (timerArmed_) sim_.cancel(timer_);
      timerArmed_ = false;
      return;
    }
    if (sndUna_ < nextSeq_)
      arm_timer();
    else if (timerArmed_) {
      sim_.cancel(timer_);
      timerArmed_ = false;
    }
    try_send();
  } else if (ackUpTo == sndUna_ && sndUna_ < nextSeq_) {
    if (++dupAcks_ == 3) {
      reno_.on_triple_dup();
      send_one(sndUna_);
    }
  }
}

FlowReceiver::FlowReceiver(int flowId, int node, int totalSegments,
                           bool sendAcks)
    : flowId_(flowId), node_(node), sendAcks_(sendAcks),
      got_(totalSegments, false) {}

void FlowReceiver::on_segment(const Segment& s) {
  if (s.flowId != flowId_ || s.isAck) return;
  if (s.seq < got_.size() && !got_[s.seq]) {
    got_[s.seq] = true;
    ++unique_;
    while (nextExpected_ < got_.size() && got_[nextExpected_]) ++nextExpected_;
    if (onNewSegment) onNewSegment(s.seq, s);
  }
  if (sendAcks_ && sendSegment) {
    Segment ack;
    ack.flowId = flowId_;
    ack.srcNode = node_;
    ack.dstNode = s.srcNode;
    ack.isAck = true;
    ack.ackUpTo = nextExpected_;
    ack.payloadBytes = 0;
    ack.ttl = kDataTtl;
    sendSegment(ack);
  }
}

ConstantRateSender::ConstantRateSender(Simulator& sim,
                                       ConstantRateParams params, int flowId,
                                       int srcNode, int dstNode,
                                       SimTime startAt)
    : sim_(sim), params_(params), flowId_(flowId), srcNode_(srcNode),
      dstNode_(dstNode), startAt_(startAt) {}

Duration ConstantRateSender::gap() const {
  return static_cast<Duration>(params_.segmentBytes) * 8 * 1'000'000'000 /
         params_.rateBps;
}

void ConstantRateSender::start() {
  sim_.schedule_at(startAt_, [this] { tick(); });
}

void ConstantRateSender::tick() {
  if (next_ >= static_cast<std::uint32_t>(params_.totalSegments)) return;
  const std::uint32_t seq = next_++;
  if (onSegmentSent) onSegmentSent(seq, 1);
  Segment s;
  s.flowId = flowId_;
  s.srcNode = srcNode_;
  s.dstNode = dstNode_;
  s.seq = seq;
  s.payloadBytes = params_.segmentBytes;
  s.ttl = kDataTtl;
  if (sendSegment) sendSegment(s);
  sim_.schedule(gap(), [this] { tick(); });
}

}  // namespace dilsim
