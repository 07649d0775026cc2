#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "dilsim/geometry.hpp"
#include "dilsim/packets.hpp"
#include "dilsim/rng.hpp"
#include "dilsim/sim.hpp"
#include "dilsim/time.hpp"

namespace dilsim {

struct RadioConfig {
  double txPowerDbm{5.0};
  double rxSensitivityDbm{-80.0};
  std::int64_t channelBps{1'000'000};
  double carrierFreqHz{2.412e9};
  // Calibrates the link budget so the usable range lands just past the
  // 100 m grid spacing (~108.5 m) instead of the ~177 m raw Friis gives.
  double systemLossDb{4.2};
  Duration slotTime{dur::micros(20)};
  Duration preambleTime{dur::micros(192)};
  int macHeaderBytes{48};
  int macQueueCap{64};
  int backoffSlots{32};  // uniform integer backoff in [0, backoffSlots)
};

/// Free-space received power in dBm for isotropic 0 dB antennas:
/// tx - 20*log10(4*pi*d*f/c) - systemLossDb. Throws on distance <= 0.
double friis_rx_power_dbm(double txPowerDbm, double distanceM,
                          const RadioConfig& cfg);

enum class FrameKind { NdnInterest, NdnData, OlsrControl, TransportSegment };

struct Frame {
  std::uint64_t id{0};
  int srcNode{-1};
  int dstNode{-1};  // -1 = broadcast; otherwise intended next hop
  FrameKind kind{FrameKind::NdnInterest};
  int payloadBytes{0};  // protocol payload, excluding the fixed MAC header
  Packet inner;
  SimTime txStart{};
  SimTime txEnd{};

  /// Bytes actually on the air (payload plus MAC+protocol header).
  int airBytes(const RadioConfig& cfg) const {
    return payloadBytes + cfg.macHeaderBytes;
  }
};

enum class RxStatus { Delivered, BelowSensitivity, Collided, TxLocalBusy };

struct ReceptionOutcome {
  int receiver{-1};
  RxStatus status{RxStatus::BelowSensitivity};
};

/// Per-node attachment point: the medium pulls positions lazily and pushes
/// successfully decoded frames back up.
class MediumClient {
 public:
  virtual ~MediumClient() = default;
  virtual Vec2 radio_position(SimTime t) = 0;
  virtual void frame_delivered(const Frame& f) = 0;
};

/// Shared lossy broadcast channel. Reception is decided per receiver:
/// delivered iff above sensitivity, no overlapping above-sensitivity frame
/// (no capture), and the receiver is not itself transmitting.
class Medium {
 public:
  Medium(Simulator& sim, RadioConfig cfg);

  void attach(int nodeId, MediumClient* client);

  const RadioConfig& config() const { return cfg_; }
  Duration airtime(int airBytes) const;

  /// True iff some other node's frame, above sensitivity here, is on the air.
  bool carrier_busy(int node) const;

  bool transmitting(int node) const;
  SimTime tx_busy_until(int node) const;

  /// Starts a transmission and returns the assigned frame id, or 0 (frame
  /// dropped, onDropBusy fired) if the source is already mid-transmission.
  /// Reception outcomes are finalized at txEnd and reported through
  /// onOutcomes / frame_delivered.
  std::uint64_t transmit(int src, Frame f);

  std::function<void(const Frame&)> onTxStart;
  std::function<void(const Frame&, const std::vector<ReceptionOutcome>&)>
      onOutcomes;
  std::function<void(const Frame&)> onDropBusy;

 private:
  struct Arrival {
    int receiver;
    bool corrupted;
  };
  struct ActiveTx {
    Frame frame;
    std::vector<Arrival> arrivals;     // receivers above sensitivity
    std::vector<int> belowSens;        // everyone else
  };

  void finalize(std::uint64_t frameId);

  Simulator& sim_;
  RadioConfig cfg_;
  std::vector<MediumClient*> clients_;   // by node id
  std::vector<SimTime> txBusyUntil_;     // by node id
  std::vector<ActiveTx> active_;
  std::uint64_t nextFrameId_{1};
};

/// 1-persistent CSMA with random slotted backoff on busy. No RTS/CTS and no
/// link-layer ACK: reliability lives in the layers above.
class Mac {
 public:
  Mac(Simulator& sim, Medium& medium, int node, RngStream backoff);

  /// Queues a frame; returns a token that can cancel it until it is on air.
  /// Returns 0 if the queue is full (frame dropped, onQueueDrop fired).
  std::uint64_t enqueue(FrameKind kind, int payloadBytes, int dst,
                        Packet inner);

  /// True if the frame was still queued and was removed.
  bool cancel(std::uint64_t token);

  std::size_t queue_depth() const;

  std::function<void(std::uint64_t token, const Frame&)> onSent;
  std::function<void(FrameKind, int payloadBytes, int dst)> onQueueDrop;

 private:
  struct Pending {
    std::uint64_t token;
    FrameKind kind;
    int payloadBytes;
    int dst;
    Packet inner;
    bool cancelled{false};
  };

  void schedule_attempt(SimTime at);
  void try_send();

  Simulator& sim_;
  Medium& medium_;
  int node_;
  RngStream backoff_;
  std::deque<Pending> q_;
  std::size_t queued_{0};  // non-cancelled entries
  bool attemptScheduled_{false};
  std::uint64_t nextToken_{1};
};

}  // namespace dilsim
