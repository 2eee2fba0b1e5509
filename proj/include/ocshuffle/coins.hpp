#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ocs {

enum class Coin : std::uint8_t { Heads = 0, Tails = 1 };

inline char to_char(Coin c) { return c == Coin::Heads ? 'H' : 'T'; }
std::vector<Coin> coins_from_string(const std::string& s);
std::string coins_to_string(const std::vector<Coin>& coins);

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Pool families of the three-card bookkeeping. Members is a bitmask over tracked
// cards: bit 0 = i, bit 1 = j, bit 2 = k.
enum class PoolKind : std::uint8_t { Free, Main, B, S, X, Y, Z, Kappa };

struct PoolLabel {
  PoolKind kind = PoolKind::Free;
  std::uint8_t members = 0;

  bool operator==(const PoolLabel&) const = default;
  std::uint64_t key() const { return (static_cast<std::uint64_t>(kind) << 8) | members; }
};

// "B^i", "S^{ij}", "free", ...
std::string to_string(PoolLabel label);

// Coin r of pool `key` under `seed`: a pure function of the three.
inline Coin coin_at(std::uint64_t seed, std::uint64_t key, std::uint64_t r) {
  std::uint64_t word = mix64(mix64(seed ^ mix64(key)) ^ (r >> 6));
  return static_cast<Coin>((word >> (r & 63)) & 1U);
}

class CoinStream {
 public:
  CoinStream(std::uint64_t seed, PoolLabel label, std::uint64_t start = 0)
      : seed_(seed), label_(label), consumed_(start) {}

  Coin at(std::uint64_t r) const { return coin_at(seed_, label_.key(), r); }
  Coin next() { return at(consumed_++); }
  std::uint64_t consumed() const { return consumed_; }
  std::uint64_t seed() const { return seed_; }
  PoolLabel label() const { return label_; }

 private:
  std::uint64_t seed_;
  PoolLabel label_;
  std::uint64_t consumed_;
};

// First `count` coins of the main stream under `seed`.
std::vector<Coin> uniform_coins(std::uint64_t seed, std::size_t count);

// Sequential coins for one Monte-Carlo trial, one mix per 64 coins.
class TrialCoins {
 public:
  TrialCoins(std::uint64_t master_seed, std::uint64_t trial)
      : key_(mix64(master_seed ^ mix64(trial ^ 0xA5A5A5A5DEADBEEFULL))) {}

  Coin next() {
    if (left_ == 0) {
      word_ = mix64(key_ ^ block_++);
      left_ = 64;
    }
    Coin c = static_cast<Coin>(word_ & 1U);
    word_ >>= 1;
    --left_;
    return c;
  }

 private:
  std::uint64_t key_;
  std::uint64_t block_ = 0;
  std::uint64_t word_ = 0;
  int left_ = 0;
};

}  // namespace ocs
