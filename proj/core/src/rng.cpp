#include "dilsim/rng.hpp"

namespace dilsim {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view streamId) {
  std::uint64_t sm = seed ^ fnv1a64(streamId);
  for (auto& w : s_) w = splitmix64_next(sm);
  if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint32_t RngStream::uniform_int(std::uint32_t bound) {
  // Multiply-shift mapping; bias is < bound/2^64, irrelevant at our scale.
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

double RngStream::uniform_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_range(double a, double b) {
  return a + (b - a) * uniform_double();
}

}  // namespace dilsim
