#include "dilsim/event_log.hpp"

#include <stdexcept>
#include <variant>

#include "dilsim/packets.hpp"

namespace dilsim {

const char* frame_kind_code(FrameKind k, const Packet& inner) {
  switch (k) {
    case FrameKind::NdnInterest:
      return "int";
    case FrameKind::NdnData:
      return "dat";
    case FrameKind::OlsrControl:
      return std::holds_alternative<TcMsg>(inner) ? "tc" : "hel";
    case FrameKind::TransportSegment:
      return std::get<Segment>(inner).isAck ? "ack" : "seg";
  }
  return "?";
}

EventLogger::EventLogger(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open event log: " + path);
}

void EventLogger::meta(const std::string& stack,
                       const std::vector<int>& consumers, int producer,
                       std::uint32_t fileChunks, int payloadBytes,
                       std::uint64_t seed, std::int64_t simEndNs,
                       bool lossIncludeControl) {
  out_ << "{\"ev\":\"meta\",\"stack\":\"" << stack << "\",\"consumers\":[";
  for (std::size_t i = 0; i < consumers.size(); ++i) {
    if (i) out_ << ',';
    out_ << consumers[i];
  }
  out_ << "],\"producer\":" << producer << ",\"fileChunks\":" << fileChunks
       << ",\"payloadBytes\":" << payloadBytes << ",\"seed\":" << seed
       << ",\"simEndNs\":" << simEndNs
       << ",\"lossIncludeControl\":" << (lossIncludeControl ? 1 : 0) << "}\n";
}

void EventLogger::tx(SimTime t, const Frame& f) {
  out_ << "{\"t\":" << t.ns << ",\"ev\":\"tx\",\"n\":" << f.srcNode
       << ",\"f\":" << f.id << ",\"k\":\"" << frame_kind_code(f.kind, f.inner)
       << "\",\"b\":" << f.payloadBytes << ",\"d\":" << f.dstNode;
  if (const auto* in = std::get_if<Interest>(&f.inner)) {
    out_ << ",\"c\":" << in->name.chunk << ",\"nn\":" << in->nonce
         << ",\"h\":" << in->hopCount;
  } else if (const auto* d = std::get_if<DataPkt>(&f.inner)) {
    out_ << ",\"c\":" << d->name.chunk << ",\"h\":" << d->hopsTravelled
         << ",\"srv\":" << d->servedBy;
  } else if (const auto* s = std::get_if<Segment>(&f.inner)) {
    out_ << ",\"fl\":" << s->flowId << ",\"s\":" << s->seq
         << ",\"a\":" << s->ackUpTo << ",\"h\":" << s->hopsTravelled;
  } else if (const auto* tc = std::get_if<TcMsg>(&f.inner)) {
    out_ << ",\"o\":" << tc->origin << ",\"s\":" << tc->seq;
  }
  out_ << "}\n";
}

void EventLogger::rx(SimTime t, int node, std::uint64_t frameId,
                     bool delivered) {
  out_ << "{\"t\":" << t.ns << ",\"ev\":\"rx\",\"n\":" << node
       << ",\"f\":" << frameId << ",\"out\":\"" << (delivered ? 'D' : 'C')
       << "\"}\n";
}

void EventLogger::drop(SimTime t, int node, FrameKind kind, int dst,
                       const char* why) {
  const char* k = kind == FrameKind::NdnInterest      ? "int"
                  : kind == FrameKind::NdnData        ? "dat"
                  : kind == FrameKind::OlsrControl    ? "ctl"
                                                      : "seg";
  out_ << "{\"t\":" << t.ns << ",\"ev\":\"drop\",\"n\":" << node
       << ",\"k\":\"" << k << "\",\"d\":" << dst << ",\"why\":\"" << why
       << "\"}\n";
}

void EventLogger::expressed(SimTime t, int consumer, std::uint32_t chunk,
                            int attempt) {
  out_ << "{\"t\":" << t.ns << ",\"ev\":\"expr\",\"n\":" << consumer
       << ",\"c\":" << chunk << ",\"at\":" << attempt << "}\n";
}

void EventLogger::delivered(SimTime t, int consumer, std::uint32_t chunk,
                            int hops, int servedBy) {
  out_ << "{\"t\":" << t.ns << ",\"ev\":\"dlv\",\"n\":" << consumer
       << ",\"c\":" << chunk << ",\"h\":" << hops << ",\"srv\":" << servedBy
       << "}\n";
}

void EventLogger::route(SimTime t, int node, int dest, int hops) {
  out_ << "{\"t\":" << t.ns << ",\"ev\":\"route\",\"n\":" << node
       << ",\"dest\":" << dest << ",\"h\":" << hops << "}\n";
}

void EventLogger::flush() { out_.flush(); }

}  // namespace dilsim
