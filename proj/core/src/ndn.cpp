#include "dilsim/ndn.hpp"

#include <algorithm>

namespace dilsim {

NdnForwarder::NdnForwarder(Simulator& sim, Mac& mac, ContentStore& cs,
                           StrategyConfig cfg, Duration slotTime,
                           RngStream defer, RngStream cacheCoin, int node)
    : sim_(sim), mac_(mac), cs_(cs), cfg_(cfg), slotTime_(slotTime),
      defer_(std::move(defer)), coin_(std::move(cacheCoin)), node_(node) {}

Duration NdnForwarder::draw_defer() {
  return static_cast<Duration>(defer_.uniform_int(cfg_.deferWindow)) *
         slotTime_;
}

InterestAction NdnForwarder::on_interest(const Interest& interest,
                                         bool fromLocal) {
  if (interest.name.prefix.empty() || interest.name.prefix[0] != '/') {
    ++protocolErrors_;
    return InterestAction::Malformed;
  }
  const std::string key = interest.name.str();

  auto& nonces = seen_[key];
  if (!fromLocal && nonces.count(interest.nonce)) {
    // Someone else already carried this exact Interest; if our own copy is
    // still waiting, it is redundant now.
    if (auto it = pit_.find(key);
        it != pit_.end() && it->second.pendingForward &&
        it->second.pendingInterest.nonce == interest.nonce)
      cancel_pending_interest(it->second);
    return InterestAction::Duplicate;
  }
  nonces.insert(interest.nonce);

  std::optional<DataPkt> content = cs_.lookup(interest.name);
  if (!content && contentSource) content = contentSource(interest);
  if (content) {
    content->hopsTravelled = 0;
    content->servedBy = node_;
    if (fromLocal) {
      if (localDelivery) localDelivery(*content);
      return InterestAction::LocalReply;
    }
    if (!pendingData_.count(key)) schedule_data_send(key, *content);
    return InterestAction::CacheReply;
  }

  auto it = pit_.find(key);
  if (it != pit_.end()) {
    PitEntry& e = it->second;
    e.nonces.insert(interest.nonce);
    if (fromLocal) {
      // Local retransmission: aggregation must not mask it, so it goes
      // back on the air with its fresh nonce.
      sim_.cancel(e.expiryEv);
      arm_pit_expiry(key);
      if (!e.pendingForward) schedule_interest_forward(key, interest);
      return InterestAction::Forwarded;
    }
    // Aggregation suppresses a second upstream copy. If our own copy was
    // itself suppressed before it ever aired, this entry has sent nothing
    // upstream yet; carrying the fresh nonce keeps the at-most-one-
    // rebroadcast bound while letting retransmissions through.
    if (!e.forwardedUpstream && !e.pendingForward) {
      schedule_interest_forward(key, interest);
      return InterestAction::Forwarded;
    }
    return InterestAction::Aggregated;
  }

  PitEntry e;
  e.nonces.insert(interest.nonce);
  pit_.emplace(key, std::move(e));
  arm_pit_expiry(key);
  schedule_interest_forward(key, interest);
  return InterestAction::Forwarded;
}

DataAction NdnForwarder::on_data(const DataPkt& data) {
  const std::string key = data.name.str();

  // Overhearing any copy of this Data suppresses our own pending copy.
  if (auto pd = pendingData_.find(key); pd != pendingData_.end()) {
    sim_.cancel(pd->second.deferEv);
    if (pd->second.macToken != 0) {
      mac_.cancel(pd->second.macToken);
      tokenKeys_.erase(pd->second.macToken);
    }
    pendingData_.erase(pd);
  }

  auto it = pit_.find(key);
  if (it == pit_.end()) return DataAction::Unsolicited;

  PitEntry& e = it->second;
  cancel_pending_interest(e);
  sim_.cancel(e.expiryEv);
  pit_.erase(it);

  cs_.insert(data, coin_);
  // The app filters by its own outstanding set, so every accepted Data is
  // offered locally; a remote Interest may have recreated the entry while
  // the app was still waiting.
  if (localDelivery) localDelivery(data);
  schedule_data_send(key, data);
  return DataAction::Accepted;
}

void NdnForwarder::schedule_interest_forward(const std::string& key,
                                             const Interest& in) {
  PitEntry& e = pit_.at(key);
  e.pendingForward = true;
  e.pendingInterest = in;
  e.deferEv = sim_.schedule(draw_defer(), [this, key] { fire_interest(key); });
}

void NdnForwarder::fire_interest(const std::string& key) {
  auto it = pit_.find(key);
  if (it == pit_.end() || !it->second.pendingForward) return;
  PitEntry& e = it->second;
  if (channelBusy && channelBusy()) {
    e.deferEv = sim_.schedule(draw_defer(), [this, key] { fire_interest(key); });
    return;
  }
  const std::uint64_t token = mac_.enqueue(
      FrameKind::NdnInterest, cfg_.interestPayloadBytes, -1, e.pendingInterest);
  if (token == 0) {
    e.pendingForward = false;  // queue overflow; consumer timers recover
    return;
  }
  e.macToken = token;
  tokenKeys_[token] = {false, key};
}

void NdnForwarder::schedule_data_send(const std::string& key,
                                      const DataPkt& d) {
  PendingData pd;
  pd.deferEv =
      sim_.schedule(draw_defer(), [this, key, d] { fire_data(key, d); });
  pendingData_[key] = pd;
}

void NdnForwarder::fire_data(const std::string& key, const DataPkt& d) {
  auto it = pendingData_.find(key);
  if (it == pendingData_.end()) return;
  if (channelBusy && channelBusy()) {
    it->second.deferEv =
        sim_.schedule(draw_defer(), [this, key, d] { fire_data(key, d); });
    return;
  }
  const std::uint64_t token =
      mac_.enqueue(FrameKind::NdnData, d.payloadBytes, -1, d);
  if (token == 0) {
    pendingData_.erase(it);
    return;
  }
  it->second.macToken = token;
  tokenKeys_[token] = {true, key};
}

void NdnForwarder::cancel_pending_interest(PitEntry& e) {
  if (!e.pendingForward) return;
  sim_.cancel(e.deferEv);
  if (e.macToken != 0) {
    mac_.cancel(e.macToken);
    tokenKeys_.erase(e.macToken);
    e.macToken = 0;
  }
  e.pendingForward = false;
}

void NdnForwarder::arm_pit_expiry(const std::string& key) {
  PitEntry& e = pit_.at(key);
  e.expiryEv = sim_.schedule(cfg_.pitLifetime, [this, key] {
    auto it = pit_.find(key);
    if (it == pit_.end()) return;
    cancel_pending_interest(it->second);
    pit_.erase(it);
  });
}

void NdnForwarder::handle_frame_sent(std::uint64_t token) {
  auto it = tokenKeys_.find(token);
  if (it == tokenKeys_.end()) return;
  const auto [isData, key] = it->second;
  tokenKeys_.erase(it);
  if (isData) {
    pendingData_.erase(key);
  } else if (auto p = pit_.find(key); p != pit_.end()) {
    p->second.pendingForward = false;
    p->second.forwardedUpstream = true;
    p->second.macToken = 0;
  }
}

bool NdnForwarder::has_pit_entry(const Name& name) const {
  return pit_.count(name.str()) > 0;
}

ConsumerApp::ConsumerApp(Simulator& sim, NdnForwarder& fw,
                         ConsumerParams params, RngStream nonceRng, int node,
                         SimTime startAt)
    : sim_(sim), fw_(fw), params_(params), nonce_(std::move(nonceRng)),
      node_(node), startAt_(startAt),
      rtt_(params.initialRto, params.minRto, params.maxRto) {}

void ConsumerApp::start() {
  sim_.schedule_at(startAt_, [this] { fill_window(); });
}

// Interest generation is RTT-paced, not bursty: new expressions are spaced
// by ~srtt/W so the window refill does not flood the channel with Data
// frames that collide with each other mid-path.
Duration ConsumerApp::pacing_gap() const {
  const Duration floor = dur::millis(20);
  if (!rtt_.has_sample()) return floor;
  const Duration g = rtt_.srtt() / params_.window;
  return std::min(std::max(g, floor), dur::millis(500));
}

void ConsumerApp::fill_window() {
  while (outstanding_.size() < static_cast<std::size_t>(params_.window) &&
         next_ < params_.fileChunks) {
    const std::uint32_t chunk = next_++;
    outstanding_[chunk];  // reserved; expressed when its pacing slot arrives
    const SimTime at = std::max(sim_.now(), nextExpressionAt_);
    nextExpressionAt_ = at + pacing_gap();
    if (at == sim_.now()) {
      express(chunk);
    } else {
      outstanding_.at(chunk).timer =
          sim_.schedule_at(at, [this, chunk] { on_timeout(chunk); });
    }
  }
}

void ConsumerApp::express(std::uint32_t chunk) {
  int attempts;
  {
    Outstanding& o = outstanding_.at(chunk);
    attempts = ++o.attempts;
    o.lastExpressed = sim_.now();
    if (attempts == 1) o.firstExpressed = sim_.now();
  }
  if (onExpressed) onExpressed(chunk, attempts);

  Interest in;
  in.name = Name{params_.prefix, chunk};
  in.nonce = static_cast<std::uint32_t>(nonce_.next_u64());
  // A local cache hit satisfies synchronously and erases the entry.
  fw_.on_interest(in, true);
  auto it = outstanding_.find(chunk);
  if (it == outstanding_.end()) return;

  // Binary backoff per chunk with +-25% jitter: chunks lost to the same
  // collision burst must not retry in lockstep. The shared estimator keeps
  // tracking the flow RTT so one starved chunk does not freeze the window.
  Duration timeout = rtt_.rto();
  for (int i = 1; i < attempts && timeout < params_.maxRto; ++i) timeout *= 2;
  timeout = std::min(timeout, params_.maxRto);
  timeout = static_cast<Duration>(
      static_cast<double>(timeout) * nonce_.uniform_range(0.75, 1.25));
  it->second.timer =
      sim_.schedule(timeout, [this, chunk] { on_timeout(chunk); });
}

void ConsumerApp::on_timeout(std::uint32_t chunk) {
  auto it = outstanding_.find(chunk);
  if (it == outstanding_.end()) return;
  express(chunk);
}

void ConsumerApp::on_chunk(const DataPkt& d) {
  auto it = outstanding_.find(d.name.chunk);
  if (it == outstanding_.end()) return;  // late duplicate
  if (it->second.attempts == 0) return;  // reserved, not yet expressed; the
                                         // copy is in our CS for later
  Outstanding o = it->second;
  sim_.cancel(o.timer);
  outstanding_.erase(it);
  ++delivered_;
  if (o.attempts == 1)  // Karn's rule: skip samples on retransmitted chunks
    rtt_.add_sample(sim_.now() - o.lastExpressed);
  if (onDelivered) onDelivered(d.name.chunk, d, o.attempts, o.firstExpressed);
  fill_window();
}

}  // namespace dilsim
