#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ocshuffle/coins.hpp"
#include "ocshuffle/params.hpp"

namespace ocs {

// What the tracked card did with the coin of one step.
enum class CoinUse : std::uint8_t { None, HeadsB, TailsB, HeadsS, TailsS };

CoinUse coin_use(const ShuffleParams& p, int pos, Coin c);

struct CardTrace {
  int card = 0;
  std::vector<int> path;      // path[r] = position after r steps
  std::vector<CoinUse> uses;  // uses[r] = bookkeeping of step r+1
  std::int64_t heads_B = 0, tails_B = 0, heads_S = 0, tails_S = 0;

  std::int64_t steps() const { return static_cast<std::int64_t>(uses.size()); }
  std::int64_t diff_B() const { return heads_B - tails_B; }
  std::int64_t diff_S() const { return heads_S - tails_S; }
  void push(int next_pos, CoinUse u);
};

// Card `card` of the identity deck followed through t steps.
CardTrace track_card(const ShuffleParams& p, int card, std::span<const Coin> coins, std::size_t t);
// Same, starting from an arbitrary position.
CardTrace track_position(const ShuffleParams& p, int start, std::span<const Coin> coins, std::size_t t);

struct TraceCheck {
  bool pass = true;
  std::int64_t step = -1;  // first failing step
  std::string detail;
};

// p(i_r) = p(i) + r + (T_S - H_S) + (T_B - m H_B) mod 2n-m+1 at every r.
TraceCheck verify_movement_identity(const CardTrace& trace, const ShuffleParams& p);

// With x = Diff(S), y = Diff(B) over the first t steps:
// || p(i_t) - p(i) - (t - floor(t/2n)(m-1) - x - floor(y(2n-m)/2n) m) ||
//   <= |y/2| + |x/2n| (sqrt(n)+1) + 4 sqrt(n).
TraceCheck verify_movement_bound(const CardTrace& trace, const ShuffleParams& p, std::int64_t t);

// Two-card comparison identity over every common step.
TraceCheck verify_pair_identity(const CardTrace& a, const CardTrace& b, const ShuffleParams& p);

std::int64_t floor_div(std::int64_t a, std::int64_t b);

}  // namespace ocs
