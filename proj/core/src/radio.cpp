#include "dilsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dilsim {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

double friis_rx_power_dbm(double txPowerDbm, double distanceM,
                          const RadioConfig& cfg) {
  if (distanceM <= 0.0)
    throw std::invalid_argument("friis_rx_power_dbm: distance must be > 0");
  const double pathLossDb =
      20.0 * std::log10(4.0 * M_PI * distanceM * cfg.carrierFreqHz /
                        kSpeedOfLight);
  return txPowerDbm - pathLossDb - cfg.systemLossDb;
}

Medium::Medium(Simulator& sim, RadioConfig cfg) : sim_(sim), cfg_(cfg) {}

void Medium::attach(int nodeId, MediumClient* client) {
  if (nodeId < 0) throw std::invalid_argument("attach: bad node id");
  if (static_cast<std::size_t>(nodeId) >= clients_.size()) {
    clients_.resize(nodeId + 1, nullptr);
    txBusyUntil_.resize(nodeId + 1, SimTime{});
  }
  clients_[nodeId] = client;
}

Duration Medium::airtime(int airBytes) const {
  return cfg_.preambleTime +
         static_cast<Duration>(airBytes) * 8 * 1'000'000'000 / cfg_.channelBps;
}

bool Medium::carrier_busy(int node) const {
  const SimTime now = sim_.now();
  for (const auto& tx : active_) {
    if (tx.frame.txEnd <= now) continue;
    if (tx.frame.srcNode == node) continue;
    for (const auto& a : tx.arrivals)
      if (a.receiver == node) return true;
  }
  return false;
}

bool Medium::transmitting(int node) const {
  return txBusyUntil_[node] > sim_.now();
}

SimTime Medium::tx_busy_until(int node) const { return txBusyUntil_[node]; }

std::uint64_t Medium::transmit(int src, Frame f) {
  const SimTime now = sim_.now();
  f.id = nextFrameId_++;
  f.srcNode = src;
  f.txStart = now;
  f.txEnd = now + airtime(f.airBytes(cfg_));

  if (transmitting(src)) {
    if (onDropBusy) onDropBusy(f);
    return 0;
  }
  txBusyUntil_[src] = f.txEnd;

  // A node that starts transmitting destroys anything it was receiving.
  for (auto& tx : active_) {
    if (tx.frame.txEnd <= now) continue;
    for (auto& a : tx.arrivals)
      if (a.receiver == src) a.corrupted = true;
  }

  ActiveTx tx;
  tx.frame = f;
  const Vec2 srcPos = clients_[src]->radio_position(now);
  for (int r = 0; r < static_cast<int>(clients_.size()); ++r) {
    if (r == src || clients_[r] == nullptr) continue;
    const Vec2 rxPos = clients_[r]->radio_position(now);
    const double d = distance(srcPos, rxPos);
    const double rx =
        d > 0.0 ? friis_rx_power_dbm(cfg_.txPowerDbm, d, cfg_)
                : cfg_.txPowerDbm;  // co-located guard; scenarios forbid it
    if (rx < cfg_.rxSensitivityDbm) {
      tx.belowSens.push_back(r);
      continue;
    }
    bool corrupted = transmitting(r);
    // Overlap with any other above-sensitivity frame at r corrupts both.
    for (auto& other : active_) {
      if (other.frame.txEnd <= now) continue;
      for (auto& a : other.arrivals) {
        if (a.receiver == r) {
          a.corrupted = true;
          corrupted = true;
        }
      }
    }
    tx.arrivals.push_back(Arrival{r, corrupted});
  }
  active_.push_back(std::move(tx));

  if (onTxStart) onTxStart(active_.back().frame);
  const std::uint64_t id = f.id;
  sim_.schedule_at(f.txEnd, [this, id] { finalize(id); });
  return id;
}

void Medium::finalize(std::uint64_t frameId) {
  auto it = std::find_if(active_.begin(), active_.end(), [&](const ActiveTx& t) {
    return t.frame.id == frameId;
  });
  if (it == active_.end()) return;
  ActiveTx tx = std::move(*it);
  active_.erase(it);

  std::vector<ReceptionOutcome> outcomes;
  outcomes.reserve(tx.arrivals.size() + tx.belowSens.size());
  for (const auto& a : tx.arrivals)
    outcomes.push_back(
        {a.receiver, a.corrupted ? RxStatus::Collided : RxStatus::Delivered});
  for (int r : tx.belowSens)
    outcomes.push_back({r, RxStatus::BelowSensitivity});

  if (onOutcomes) onOutcomes(tx.frame, outcomes);
  for (const auto& o : outcomes) {
    if (o.status == RxStatus::Delivered)
      clients_[o.receiver]->frame_delivered(tx.frame);
  }
}

Mac::Mac(Simulator& sim, Medium& medium, int node, RngStream backoff)
    : sim_(sim), medium_(medium), node_(node), backoff_(std::move(backoff)) {}

std::uint64_t Mac::enqueue(FrameKind kind, int payloadBytes, int dst,
                           Packet inner) {
  if (queued_ >= static_cast<std::size_t>(medium_.config().macQueueCap)) {
    if (onQueueDrop) onQueueDrop(kind, payloadBytes, dst);
    return 0;
  }
  Pending p;
  p.token = nextToken_++;
  p.kind = kind;
  p.payloadBytes = payloadBytes;
  p.dst = dst;
  p.inner = std::move(inner);
  q_.push_back(std::move(p));
  ++queued_;
  if (!attemptScheduled_) schedule_attempt(sim_.now());
  return q_.back().token;
}

bool Mac::cancel(std::uint64_t token) {
  for (auto& p : q_) {
    if (p.token == token && !p.cancelled) {
      p.cancelled = true;
      --queued_;
      return true;
    }
  }
  return false;
}

std::size_t Mac::queue_depth() const { return queued_; }

void Mac::schedule_attempt(SimTime at) {
  attemptScheduled_ = true;
  sim_.schedule_at(at, [this] { try_send(); });
}

void Mac::try_send() {
  attemptScheduled_ = false;
  while (!q_.empty() && q_.front().cancelled) q_.pop_front();
  if (q_.empty()) return;

  const auto backoff = [this] {
    return static_cast<Duration>(
               backoff_.uniform_int(medium_.config().backoffSlots)) *
           medium_.config().slotTime;
  };
  if (medium_.transmitting(node_)) {
    // Contention window after our own frame too, so that two hidden
    // back-to-back senders do not stay phase-locked forever.
    schedule_attempt(medium_.tx_busy_until(node_) + backoff());
    return;
  }
  if (medium_.carrier_busy(node_)) {
    schedule_attempt(sim_.now() + backoff());
    return;
  }

  Pending p = std::move(q_.front());
  q_.pop_front();
  --queued_;

  Frame f;
  f.dstNode = p.dst;
  f.kind = p.kind;
  f.payloadBytes = p.payloadBytes;
  f.inner = std::move(p.inner);
  if (std::uint64_t id = medium_.transmit(node_, f); id != 0) {
    if (onSent) {
      Frame sent = f;
      sent.id = id;
      sent.srcNode = node_;
      sent.txStart = sim_.now();
      sent.txEnd = medium_.tx_busy_until(node_);
      onSent(p.token, sent);
    }
    if (queued_ > 0) {
      const Duration cw = static_cast<Duration>(backoff_.uniform_int(
                              medium_.config().backoffSlots)) *
                          medium_.config().slotTime;
      schedule_attempt(medium_.tx_busy_until(node_) + cw);
    }
  }
}

}  // namespace dilsim
