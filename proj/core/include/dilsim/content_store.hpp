#pragma once

#include <list>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dilsim/packets.hpp"
#include "dilsim/rng.hpp"

namespace dilsim {

enum class CachePolicy { Lru, Plru };

/// Bounded cache of Data packets. LRU evicts the least recently used entry
/// on overflow; pLRU additionally gates each new insertion on a coin flip
/// with probability p (duplicates only refresh recency, no coin spent).
class ContentStore {
 public:
  ContentStore(std::size_t capacity, CachePolicy policy = CachePolicy::Lru,
               double p = 1.0);

  /// Returns true if the item ended up (or already was) in the store.
  bool insert(const DataPkt& data, RngStream& coin);

  /// Hit refreshes recency.
  std::optional<DataPkt> lookup(const Name& name);

  std::size_t size() const { return order_.size(); }
  std::size_t capacity() const { return capacity_; }
  CachePolicy policy() const { return policy_; }
  double admit_probability() const { return p_; }

  /// Names most-recently-used first (reference-model comparisons).
  std::vector<std::string> recency_order() const;

 private:
  std::size_t capacity_;
  CachePolicy policy_;
  double p_;
  std::list<DataPkt> order_;  // MRU at front
  std::unordered_map<std::string, std::list<DataPkt>::iterator> index_;
};

}  // namespace dilsim
