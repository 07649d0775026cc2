#include "dilsim/node.hpp"

#include <variant>

namespace dilsim {

void Node::frame_delivered(const Frame& f) {
  if (auto* in = std::get_if<Interest>(&f.inner)) {
    if (!forwarder) return;
    Interest copy = *in;
    copy.hopCount += 1;
    forwarder->on_interest(copy, false);
    return;
  }
  if (auto* d = std::get_if<DataPkt>(&f.inner)) {
    if (!forwarder) return;
    DataPkt copy = *d;
    copy.hopsTravelled += 1;
    forwarder->on_data(copy);
    return;
  }
  if (auto* h = std::get_if<HelloMsg>(&f.inner)) {
    if (olsr) olsr->on_hello(*h);
    return;
  }
  if (auto* tc = std::get_if<TcMsg>(&f.inner)) {
    if (olsr) olsr->on_tc(*tc, f.srcNode);
    return;
  }
  if (auto* seg = std::get_if<Segment>(&f.inner)) {
    if (!olsr) return;
    if (f.dstNode != id_) return;  // overheard unicast, not for us
    Segment copy = *seg;
    copy.hopsTravelled += 1;
    if (copy.dstNode == id_) {
      if (copy.isAck) {
        if (auto it = senders.find(copy.flowId); it != senders.end())
          it->second->on_ack(copy);
      } else if (flowReceiver) {
        flowReceiver->on_segment(copy);
      }
      return;
    }
    // relay towards the destination
    copy.ttl -= 1;
    if (copy.ttl <= 0) {
      if (onSegmentDrop) onSegmentDrop(copy, "ttl");
      return;
    }
    send_segment(copy);
    return;
  }
}

bool Node::send_segment(const Segment& s) {
  if (!olsr || !mac) return false;
  const auto nh = olsr->next_hop(s.dstNode);
  if (!nh) {
    if (onSegmentDrop) onSegmentDrop(s, "noroute");
    return false;
  }
  const std::uint64_t token = mac->enqueue(FrameKind::TransportSegment,
                                           s.payloadBytes, *nh, s);
  return token != 0;
}

}  // namespace dilsim
