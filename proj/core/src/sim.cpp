#include "dilsim/sim.hpp"

#include <stdexcept>

namespace dilsim {

EventHandle Simulator::schedule(Duration delay, std::function<void()> fn) {
  if (delay < 0) throw std::invalid_argument("schedule: negative delay");
  return schedule_at(now_ + delay, std::move(fn));
}

EventHandle Simulator::schedule_at(SimTime at, std::function<void()> fn) {
  if (at < now_) throw std::invalid_argument("schedule_at: time in the past");
  auto ev = std::make_shared<detail::Event>();
  ev->at = at;
  ev->seq = nextSeq_++;
  ev->fn = std::move(fn);
  queue_.push(ev);
  return EventHandle{ev};
}

bool Simulator::cancel(const EventHandle& h) {
  auto ev = h.ev_.lock();
  if (!ev || ev->done) return false;
  ev->done = true;
  ev->fn = nullptr;  // release captures eagerly
  return true;
}

std::size_t Simulator::run_until(SimTime end) {
  if (end < now_) throw std::invalid_argument("run_until: end before now");
  std::size_t executed = 0;
  while (!queue_.empty()) {
    auto ev = queue_.top();
    if (ev->at > end) break;
    queue_.pop();
    if (ev->done) continue;
    now_ = ev->at;
    ev->done = true;
    auto fn = std::move(ev->fn);
    fn();
    ++executed;
  }
  now_ = end;
  return executed;
}

std::size_t Simulator::run_all() {
  std::size_t executed = 0;
  while (!queue_.empty()) {
    auto ev = queue_.top();
    queue_.pop();
    if (ev->done) continue;
    now_ = ev->at;
    ev->done = true;
    auto fn = std::move(ev->fn);
    fn();
    ++executed;
  }
  return executed;
}

}  // namespace dilsim
