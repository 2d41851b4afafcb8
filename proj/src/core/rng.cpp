#include "rng.hpp"

#include <cmath>

namespace levyham {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> Philox4x64::block(
    const std::array<std::uint64_t, 2>& key,
    const std::array<std::uint64_t, 4>& counter) {
  std::array<std::uint64_t, 4> c = counter;
  std::uint64_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(StreamId id, std::uint64_t substream) {
  key_[0] = id.master_seed;
  key_[1] = splitmix64(splitmix64(id.path_index) ^ substream);
}

std::uint64_t RandomStream::next_u64() {
  if (block_pos_ == 4) {
    block_ = Philox4x64::block(key_, {counter_, 0, 0, 0});
    ++counter_;
    block_pos_ = 0;
  }
  return block_[block_pos_++];
}

double RandomStream::uniform() {
  // 53 significant bits, forced odd so the result lies strictly in (0,1).
  const std::uint64_t bits = (next_u64() >> 11) | 1ULL;
  return static_cast<double>(bits) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  if (have_cached_gaussian_) {
    have_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_gaussian_ = r * std::sin(angle);
  have_cached_gaussian_ = true;
  return r * std::cos(angle);
}

double RandomStream::exponential() { return -std::log(uniform()); }

}  // namespace levyham
