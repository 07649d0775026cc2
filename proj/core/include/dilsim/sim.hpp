#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <vector>

#include "dilsim/time.hpp"

namespace dilsim {

namespace detail {
struct Event {
  SimTime at;
  std::uint64_t seq{0};
  std::function<void()> fn;
  bool done{false};  // fired or cancelled
};
}  // namespace detail

/// Handle returned by Simulator::schedule, usable for cancellation.
class EventHandle {
 public:
  EventHandle() = default;

 private:
  friend class Simulator;
  explicit EventHandle(std::weak_ptr<detail::Event> ev) : ev_(std::move(ev)) {}
  std::weak_ptr<detail::Event> ev_;
};

/// Single-threaded discrete-event engine. Events at equal timestamps run in
/// insertion order (stable FIFO tie-break), which together with the integer
/// clock makes whole runs bit-reproducible.
class Simulator {
 public:
  EventHandle schedule(Duration delay, std::function<void()> fn);
  EventHandle schedule_at(SimTime at, std::function<void()> fn);

  /// True if the event had not fired and is now cancelled.
  bool cancel(const EventHandle& h);

  /// Executes all events with fireAt <= end, leaves the clock at end.
  /// Returns the number of events executed.
  std::size_t run_until(SimTime end);

  /// Drains the queue completely (tests/tools).
  std::size_t run_all();

  SimTime now() const { return now_; }
  std::size_t pending() const { return queue_.size(); }

 private:
  struct Later {
    bool operator()(const std::shared_ptr<detail::Event>& a,
                    const std::shared_ptr<detail::Event>& b) const {
      if (a->at != b->at) return a->at > b->at;
      return a->seq > b->seq;
    }
  };

  std::priority_queue<std::shared_ptr<detail::Event>,
                      std::vector<std::shared_ptr<detail::Event>>, Later>
      queue_;
  SimTime now_{};
  std::uint64_t nextSeq_{0};
};

}  // namespace dilsim
