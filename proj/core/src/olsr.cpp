#include "dilsim/olsr.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace dilsim {

namespace {
int hello_bytes(const HelloMsg& h) {
  return 8 + 6 * static_cast<int>(h.links.size());
}
int tc_bytes(const TcMsg& t) {
  return 12 + 4 * static_cast<int>(t.advertised.size());
}
}  // namespace

OlsrNode::OlsrNode(Simulator& sim, Mac& mac, int node, OlsrConfig cfg,
                   RngStream jitter)
    : sim_(sim), mac_(mac), node_(node), cfg_(cfg), jitter_(std::move(jitter)) {}

void OlsrNode::start() {
  started_ = true;
  const auto jit = [this](Duration max) {
    return static_cast<Duration>(
        jitter_.uniform_int(static_cast<std::uint32_t>(max)));
  };
  sim_.schedule(jit(cfg_.maxJitter), [this] { emit_hello(); });
  sim_.schedule(cfg_.tcInterval / 2 + jit(cfg_.maxJitter),
                [this] { emit_tc(); });
}

HelloMsg OlsrNode::make_hello() const {
  HelloMsg h;
  h.origin = node_;
  const SimTime now = sim_.now();
  for (const auto& [addr, st] : links_) {
    if (st.asymUntil <= now && st.symUntil <= now) continue;
    h.links.push_back(HelloMsg::LinkInfo{addr, st.symUntil > now,
                                         mprSet_.count(addr) > 0});
  }
  return h;
}

void OlsrNode::emit_hello() {
  sweep_expired();
  HelloMsg h = make_hello();
  mac_.enqueue(FrameKind::OlsrControl, hello_bytes(h), -1, h);
  const Duration jitter = static_cast<Duration>(
      jitter_.uniform_int(static_cast<std::uint32_t>(cfg_.maxJitter)));
  sim_.schedule(cfg_.helloInterval - jitter, [this] { emit_hello(); });
}

void OlsrNode::emit_tc() {
  sweep_expired();
  if (!selectorUntil_.empty()) {
    TcMsg tc;
    tc.origin = node_;
    tc.seq = ++tcSeq_;
    for (const auto& [sel, until] : selectorUntil_) {
      (void)until;
      tc.advertised.push_back(sel);
    }
    tc.ttl = cfg_.tcTtl;
    tcSeen_.insert((static_cast<std::uint64_t>(node_) << 32) | tc.seq);
    mac_.enqueue(FrameKind::OlsrControl, tc_bytes(tc), -1, tc);
    ++tcOriginated_;
  }
  const Duration jitter = static_cast<Duration>(
      jitter_.uniform_int(static_cast<std::uint32_t>(cfg_.maxJitter)));
  sim_.schedule(cfg_.tcInterval - jitter, [this] { emit_tc(); });
}

void OlsrNode::on_hello(const HelloMsg& hello) {
  const SimTime now = sim_.now();
  const int from = hello.origin;
  LinkState& ls = links_[from];
  ls.asymUntil = now + cfg_.neighborHold;

  bool listsMe = false;
  bool selectsMe = false;
  for (const auto& l : hello.links) {
    if (l.addr == node_) {
      listsMe = true;
      selectsMe = l.mpr;
    }
  }
  if (listsMe) ls.symUntil = now + cfg_.neighborHold;

  if (ls.symUntil > now) {
    auto& th = twoHop_[from];
    th.clear();
    for (const auto& l : hello.links)
      if (l.symmetric && l.addr != node_) th.insert(l.addr);
  }
  if (selectsMe)
    selectorUntil_[from] = now + cfg_.neighborHold;

  sim_.schedule(cfg_.neighborHold, [this] { sweep_expired(); });
  recompute();
}

bool OlsrNode::on_tc(const TcMsg& tc, int fromNode) {
  if (tc.origin == node_) return false;
  const SimTime now = sim_.now();
  const std::uint64_t key =
      (static_cast<std::uint64_t>(tc.origin) << 32) | tc.seq;
  if (tcSeen_.count(key)) return false;  // duplicate
  tcSeen_.insert(key);

  auto it = topo_.find(tc.origin);
  if (it != topo_.end() && tc.seq < it->second.seq) return false;  // stale
  TopoRecord rec;
  rec.seq = tc.seq;
  rec.dests.insert(tc.advertised.begin(), tc.advertised.end());
  rec.until = now + cfg_.topologyHold;
  topo_[tc.origin] = std::move(rec);
  sim_.schedule(cfg_.topologyHold, [this] { sweep_expired(); });
  recompute();

  // Flooding rule: retransmit only when the last hop picked us as MPR.
  auto sel = selectorUntil_.find(fromNode);
  const bool senderSelectedMe =
      sel != selectorUntil_.end() && sel->second > now;
  if (senderSelectedMe && tc.ttl > 1) {
    TcMsg relay = tc;
    relay.ttl -= 1;
    mac_.enqueue(FrameKind::OlsrControl, tc_bytes(relay), -1, relay);
    ++tcRelays_;
    return true;
  }
  return false;
}

void OlsrNode::sweep_expired() {
  const SimTime now = sim_.now();
  bool changed = false;
  for (auto it = links_.begin(); it != links_.end();) {
    if (it->second.asymUntil <= now && it->second.symUntil <= now) {
      twoHop_.erase(it->first);
      it = links_.erase(it);
      changed = true;
    } else {
      if (it->second.symUntil <= now && twoHop_.erase(it->first) > 0)
        changed = true;
      ++it;
    }
  }
  for (auto it = selectorUntil_.begin(); it != selectorUntil_.end();) {
    if (it->second <= now) {
      it = selectorUntil_.erase(it);
      changed = true;
    } else {
      ++it;
    }
  }
  for (auto it = topo_.begin(); it != topo_.end();) {
    if (it->second.until <= now) {
      it = topo_.erase(it);
      changed = true;
    } else {
      ++it;
    }
  }
  if (changed && started_) recompute();
}

std::set<int> OlsrNode::symmetric_neighbors() const {
  std::set<int> out;
  const SimTime now = sim_.now();
  for (const auto& [addr, st] : links_)
    if (st.symUntil > now) out.insert(addr);
  return out;
}

std::set<int> OlsrNode::mpr_selectors() const {
  std::set<int> out;
  const SimTime now = sim_.now();
  for (const auto& [addr, until] : selectorUntil_)
    if (until > now) out.insert(addr);
  return out;
}

std::set<int> OlsrNode::select_mprs(
    int self, const std::set<int>& neighbors,
    const std::map<int, std::set<int>>& twoHopByNeighbor) {
  // Strict 2-hop set: reachable through a neighbor, not self, not already a
  // direct neighbor.
  std::set<int> strict;
  for (const auto& [nb, reach] : twoHopByNeighbor) {
    if (!neighbors.count(nb)) continue;
    for (int x : reach)
      if (x != self && !neighbors.count(x)) strict.insert(x);
  }

  auto coverage = [&](int nb) {
    std::set<int> out;
    auto it = twoHopByNeighbor.find(nb);
    if (it == twoHopByNeighbor.end()) return out;
    for (int x : it->second)
      if (strict.count(x)) out.insert(x);
    return out;
  };

  std::set<int> mprs;
  std::set<int> uncovered = strict;

  // Sole-provider rule first.
  for (int target : strict) {
    int provider = -1;
    int count = 0;
    for (int nb : neighbors) {
      if (coverage(nb).count(target)) {
        ++count;
        provider = nb;
      }
    }
    if (count == 1) mprs.insert(provider);
  }
  for (int m : mprs)
    for (int x : coverage(m)) uncovered.erase(x);

  // Greedy cover for the rest.
  while (!uncovered.empty()) {
    int best = -1;
    std::size_t bestGain = 0;
    std::size_t bestDegree = 0;
    for (int nb : neighbors) {
      if (mprs.count(nb)) continue;
      const std::set<int> cov = coverage(nb);
      std::size_t gain = 0;
      for (int x : cov)
        if (uncovered.count(x)) ++gain;
      if (gain == 0) continue;
      if (gain > bestGain ||
          (gain == bestGain && (cov.size() > bestDegree ||
                                (cov.size() == bestDegree && nb < best)))) {
        best = nb;
        bestGain = gain;
        bestDegree = cov.size();
      }
    }
    if (best < 0) break;  // uncoverable leftovers (inconsistent 2-hop view)
    mprs.insert(best);
    for (int x : coverage(best)) uncovered.erase(x);
  }
  return mprs;
}

void OlsrNode::recompute() {
  const std::set<int> nbs = symmetric_neighbors();
  std::map<int, std::set<int>> twoHop;
  for (const auto& [nb, reach] : twoHop_)
    if (nbs.count(nb)) twoHop[nb] = reach;

  mprSet_ = select_mprs(node_, nbs, twoHop);

  // Coverage invariant: every strict 2-hop neighbor reachable via >=1 MPR.
  std::set<int> strict;
  for (const auto& [nb, reach] : twoHop)
    for (int x : reach)
      if (x != node_ && !nbs.count(x)) strict.insert(x);
  for (int x : strict) {
    bool covered = false;
    for (int m : mprSet_) {
      auto it = twoHop.find(m);
      if (it != twoHop.end() && it->second.count(x)) {
        covered = true;
        break;
      }
    }
    if (!covered)
      throw std::logic_error("MPR coverage violated after recomputation");
  }

  compute_routes();
}

void OlsrNode::compute_routes() {
  const std::set<int> nbs = symmetric_neighbors();

  // Hop-count BFS over: direct links, advertised topology edges, and the
  // 2-hop view. Sorted adjacency keeps tie-breaks (lowest id) reproducible.
  std::map<int, std::set<int>> adj;
  for (int nb : nbs) adj[node_].insert(nb);
  for (const auto& [nb, reach] : twoHop_) {
    if (!nbs.count(nb)) continue;
    for (int x : reach)
      if (x != node_) adj[nb].insert(x);
  }
  for (const auto& [origin, rec] : topo_) {
    for (int d : rec.dests) {
      adj[origin].insert(d);
      adj[d].insert(origin);
    }
  }

  std::map<int, std::pair<int, int>> routes;  // dest -> (nextHop, hops)
  std::map<int, int> dist;
  std::queue<int> frontier;
  dist[node_] = 0;
  frontier.push(node_);
  std::map<int, int> firstHop;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    auto it = adj.find(u);
    if (it == adj.end()) continue;
    for (int v : it->second) {
      if (dist.count(v)) continue;
      dist[v] = dist[u] + 1;
      firstHop[v] = (u == node_) ? v : firstHop[u];
      frontier.push(v);
      routes[v] = {firstHop[v], dist[v]};
    }
  }
  routes_ = std::move(routes);

  if (watchedDest_ >= 0) {
    std::optional<int> hops;
    if (auto it = routes_.find(watchedDest_); it != routes_.end())
      hops = it->second.second;
    if (hops != lastWatchedHops_) {
      lastWatchedHops_ = hops;
      if (onWatchedRoute_) onWatchedRoute_(watchedDest_, hops);
    }
  }
}

std::optional<int> OlsrNode::next_hop(int dest) const {
  auto it = routes_.find(dest);
  if (it == routes_.end()) return std::nullopt;
  return it->second.first;
}

std::optional<int> OlsrNode::route_hops(int dest) const {
  auto it = routes_.find(dest);
  if (it == routes_.end()) return std::nullopt;
  return it->second.second;
}

void OlsrNode::watch_route(int dest,
                           std::function<void(int, std::optional<int>)> cb) {
  watchedDest_ = dest;
  onWatchedRoute_ = std::move(cb);
  lastWatchedHops_.reset();
}

}  // namespace dilsim
