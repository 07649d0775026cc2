#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace dilsim {

/// Content name: a prefix plus the chunk index as the final numeric
/// component, e.g. /test/content/417.
struct Name {
  std::string prefix;
  std::uint32_t chunk{0};

  std::string str() const { return prefix + "/" + std::to_string(chunk); }
  bool operator==(const Name&) const = default;
};

struct Interest {
  Name name;
  std::uint32_t nonce{0};
  int hopCount{0};  // wireless hops travelled so far
};

struct DataPkt {
  Name name;
  int payloadBytes{0};
  int hopsTravelled{0};  // hops since the node that served it
  int servedBy{-1};      // producer or the cache that answered
};

struct HelloMsg {
  struct LinkInfo {
    int addr;
    bool symmetric;
    bool mpr;  // the sender selected addr as MPR
  };
  int origin{-1};
  std::vector<LinkInfo> links;
};

struct TcMsg {
  int origin{-1};
  std::uint32_t seq{0};
  std::vector<int> advertised;  // the origin's MPR selectors
  int ttl{0};
};

/// Transport segment for the routed stack; doubles as ACK when isAck.
struct Segment {
  int flowId{-1};  // keyed by consumer node id
  int srcNode{-1};
  int dstNode{-1};
  std::uint32_t seq{0};
  bool isAck{false};
  std::uint32_t ackUpTo{0};  // cumulative: next expected seq
  int payloadBytes{0};
  int ttl{0};
  int hopsTravelled{0};
};

using Packet = std::variant<Interest, DataPkt, HelloMsg, TcMsg, Segment>;

}  // namespace dilsim
