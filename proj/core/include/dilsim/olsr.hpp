#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>

#include "dilsim/packets.hpp"
#include "dilsim/radio.hpp"
#include "dilsim/rng.hpp"
#include "dilsim/sim.hpp"

namespace dilsim {

struct OlsrConfig {
  Duration helloInterval{dur::seconds(2)};
  Duration tcInterval{dur::seconds(5)};
  Duration neighborHold{dur::seconds(6)};
  Duration topologyHold{dur::seconds(15)};
  Duration maxJitter{dur::millis(500)};
  int tcTtl{16};
};

/// Proactive link-state agent of one node: HELLO link sensing, MPR
/// selection, TC dissemination relayed only by MPRs, and hop-count
/// shortest-path routes over the learned topology.
class OlsrNode {
 public:
  OlsrNode(Simulator& sim, Mac& mac, int node, OlsrConfig cfg,
           RngStream jitter);

  void start();

  void on_hello(const HelloMsg& hello);
  bool on_tc(const TcMsg& tc, int fromNode);  // true if relayed

  HelloMsg make_hello() const;

  std::optional<int> next_hop(int dest) const;
  std::optional<int> route_hops(int dest) const;
  std::set<int> symmetric_neighbors() const;
  const std::set<int>& mpr_set() const { return mprSet_; }
  std::set<int> mpr_selectors() const;

  /// Emits (dest, hops or nullopt) whenever the watched route appears,
  /// changes length, or disappears. Used for partition-stall tracking.
  void watch_route(int dest,
                   std::function<void(int, std::optional<int>)> onChange);

  /// RFC-style greedy cover: neighbors that are the sole reach of some
  /// strict 2-hop node first, then the neighbor covering the most uncovered
  /// 2-hop nodes; ties prefer larger total 2-hop coverage, then lower id.
  static std::set<int> select_mprs(
      int self, const std::set<int>& neighbors,
      const std::map<int, std::set<int>>& twoHopByNeighbor);

  int tc_relays() const { return tcRelays_; }
  int tc_originated() const { return tcOriginated_; }

 private:
  struct LinkState {
    SimTime asymUntil{};
    SimTime symUntil{};
  };
  struct TopoRecord {
    std::uint32_t seq{0};
    std::set<int> dests;
    SimTime until{};
  };

  void emit_hello();
  void emit_tc();
  void sweep_expired();
  void recompute();
  void compute_routes();

  Simulator& sim_;
  Mac& mac_;
  int node_;
  OlsrConfig cfg_;
  RngStream jitter_;

  std::map<int, LinkState> links_;
  std::map<int, std::set<int>> twoHop_;  // sym neighbor -> its sym neighbors
  std::set<int> mprSet_;
  std::map<int, SimTime> selectorUntil_;
  std::map<int, TopoRecord> topo_;  // by origin
  std::unordered_set<std::uint64_t> tcSeen_;
  std::uint32_t tcSeq_{0};
  std::map<int, std::pair<int, int>> routes_;  // dest -> (nextHop, hops)

  int watchedDest_{-1};
  std::function<void(int, std::optional<int>)> onWatchedRoute_;
  std::optional<int> lastWatchedHops_;
  bool started_{false};

  int tcRelays_{0};
  int tcOriginated_{0};
};

}  // namespace dilsim
