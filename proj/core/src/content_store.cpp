#include "dilsim/content_store.hpp"

#include <stdexcept>

namespace dilsim {

ContentStore::ContentStore(std::size_t capacity, CachePolicy policy, double p)
    : capacity_(capacity), policy_(policy), p_(p) {
  if (capacity == 0) throw std::invalid_argument("content store capacity 0");
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("admit probability outside [0,1]");
}

bool ContentStore::insert(const DataPkt& data, RngStream& coin) {
  const std::string key = data.name.str();
  if (auto it = index_.find(key); it != index_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    return true;
  }
  if (policy_ == CachePolicy::Plru && coin.uniform_double() >= p_)
    return false;
  order_.push_front(data);
  index_[key] = order_.begin();
  if (order_.size() > capacity_) {
    index_.erase(order_.back().name.str());
    order_.pop_back();
  }
  return true;
}

std::optional<DataPkt> ContentStore::lookup(const Name& name) {
  auto it = index_.find(name.str());
  if (it == index_.end()) return std::nullopt;
  order_.splice(order_.begin(), order_, it->second);
  return *order_.begin();
}

std::vector<std::string> ContentStore::recency_order() const {
  std::vector<std::string> out;
  out.reserve(order_.size());
  for (const auto& d : order_) out.push_back(d.name.str());
  return out;
}

}  // namespace dilsim
