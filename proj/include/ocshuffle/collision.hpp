#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ocshuffle/coins.hpp"
#include "ocshuffle/params.hpp"

namespace ocs {

// At even time t with coins t, t+1 equal to HT or TH, the cards at positions
// (m-1, m, n) collide in that order. HT realises the 3-cycle, TH the identity.
struct CollisionEvent {
  std::int64_t time = 0;
  std::array<int, 3> cards{};  // cards at m-1, m, n
  bool three_cycle = false;

  bool involves(int card) const { return cards[0] == card || cards[1] == card || cards[2] == card; }
};

// Identity start deck; scans even t <= t_max with coins t and t+1 available.
std::vector<CollisionEvent> detect_collisions(const ShuffleParams& p, std::span<const Coin> coins,
                                              std::int64_t t_max);

struct MatchResult {
  int card = 0;
  int front = 0;
  int back = 0;
  bool matched = false;
  std::int64_t time = -1;  // time of the matching collision
};

// Collision events ordered by time.
struct RunRecord {
  std::vector<CollisionEvent> events;
};

RunRecord record_run(const ShuffleParams& p, std::span<const Coin> coins, std::int64_t t_max);

// First collision of x in (T, t]; a match only when it is also the first in (T, t]
// for the other two participants.
MatchResult first_match_after(const ShuffleParams& p, const RunRecord& record, std::int64_t T, std::int64_t t,
                              int x);

}  // namespace ocs
