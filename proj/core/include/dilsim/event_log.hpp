#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "dilsim/radio.hpp"
#include "dilsim/time.hpp"

namespace dilsim {

/// Newline-delimited JSON trace of medium and protocol events, integers
/// only, so identical runs produce identical bytes. This is the input the
/// replay oracle recomputes all metrics from.
class EventLogger {
 public:
  explicit EventLogger(const std::string& path);

  void meta(const std::string& stack, const std::vector<int>& consumers,
            int producer, std::uint32_t fileChunks, int payloadBytes,
            std::uint64_t seed, std::int64_t simEndNs,
            bool lossIncludeControl);

  void tx(SimTime t, const Frame& f);
  void rx(SimTime t, int node, std::uint64_t frameId, bool delivered);
  void drop(SimTime t, int node, FrameKind kind, int dst, const char* why);
  void expressed(SimTime t, int consumer, std::uint32_t chunk, int attempt);
  void delivered(SimTime t, int consumer, std::uint32_t chunk, int hops,
                 int servedBy);
  void route(SimTime t, int node, int dest, int hops);  // hops -1 = no route

  void flush();

 private:
  std::ofstream out_;
};

const char* frame_kind_code(FrameKind k, const Packet& inner);

}  // namespace dilsim
