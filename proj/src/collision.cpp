#include "ocshuffle/collision.hpp"

#include <stdexcept>

#include "ocshuffle/deck.hpp"

namespace ocs {

std::vector<CollisionEvent> detect_collisions(const ShuffleParams& p, std::span<const Coin> coins,
                                              std::int64_t t_max) {
  std::vector<CollisionEvent> out;
  Deck deck(p);
  const std::int64_t avail = static_cast<std::int64_t>(coins.size());
  for (std::int64_t t = 0; t + 1 < avail && t <= t_max; t += 2) {
    const Coin a = coins[t], b = coins[t + 1];
    if (a != b) {
      CollisionEvent e;
      e.time = t;
      e.cards = {deck.card_at(p.m() - 1), deck.card_at(p.m()), deck.card_at(p.n())};
      if (e.cards[0] == e.cards[1] || e.cards[1] == e.cards[2] || e.cards[0] == e.cards[2])
        throw std::logic_error("collision positions hold a repeated card");
      e.three_cycle = a == Coin::Heads;
      out.push_back(e);
    }
    deck.step(a);
    deck.step(b);
  }
  return out;
}

RunRecord record_run(const ShuffleParams& p, std::span<const Coin> coins, std::int64_t t_max) {
  return RunRecord{detect_collisions(p, coins, t_max)};
}

MatchResult first_match_after(const ShuffleParams& p, const RunRecord& record, std::int64_t T, std::int64_t t,
                              int x) {
  if (T > t) throw InvalidArgument("first_match_after needs T <= t");
  if (x < 1 || x > p.n()) throw InvalidArgument("card out of range");
  MatchResult r{x, x, x, false, -1};
  const CollisionEvent* hit = nullptr;
  for (const auto& e : record.events) {
    if (e.time <= T) continue;
    if (e.time > t) break;
    if (e.involves(x)) {
      hit = &e;
      break;
    }
  }
  if (!hit) return r;
  int at = hit->cards[0] == x ? 0 : hit->cards[1] == x ? 1 : 2;
  const int y = hit->cards[(at + 1) % 3];
  const int z = hit->cards[(at + 2) % 3];
  for (const auto& e : record.events) {
    if (e.time <= T) continue;
    if (e.time >= hit->time) break;
    if (e.involves(y) || e.involves(z)) return r;
  }
  return MatchResult{x, y, z, true, hit->time};
}

}  // namespace ocs
