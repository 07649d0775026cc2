#pragma once

#include <algorithm>
#include <cstdlib>

#include "dilsim/time.hpp"

namespace dilsim {

/// Jacobson/Karels retransmission-timeout estimator with binary backoff,
/// integer nanosecond arithmetic throughout.
class RttEstimator {
 public:
  RttEstimator(Duration initialRto, Duration minRto, Duration maxRto)
      : rto_(clamp(initialRto, minRto, maxRto)), minRto_(minRto),
        maxRto_(maxRto) {}

  void add_sample(Duration rtt) {
    if (!hasSample_) {
      srtt_ = rtt;
      rttvar_ = rtt / 2;
      hasSample_ = true;
    } else {
      rttvar_ = (3 * rttvar_ + std::llabs(srtt_ - rtt)) / 4;
      srtt_ = (7 * srtt_ + rtt) / 8;
    }
    rto_ = clamp(srtt_ + 4 * rttvar_, minRto_, maxRto_);
  }

  void on_timeout() { rto_ = std::min(rto_ * 2, maxRto_); }

  Duration rto() const { return rto_; }
  Duration srtt() const { return srtt_; }
  Duration rttvar() const { return rttvar_; }
  bool has_sample() const { return hasSample_; }

 private:
  static Duration clamp(Duration v, Duration lo, Duration hi) {
    return std::max(lo, std::min(v, hi));
  }

  Duration srtt_{0};
  Duration rttvar_{0};
  Duration rto_;
  Duration minRto_;
  Duration maxRto_;
  bool hasSample_{false};
};

}  // namespace dilsim
