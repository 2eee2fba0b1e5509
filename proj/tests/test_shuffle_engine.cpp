#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "ocshuffle/collision.hpp"
#include "ocshuffle/deck.hpp"
#include "ocshuffle/metric.hpp"
#include "ocshuffle/montecarlo.hpp"
#include "ocshuffle/trace.hpp"

using namespace ocs;

namespace {

std::vector<int> cards_of(const DeckState& d) { return {d.perm.begin() + 1, d.perm.end()}; }

std::vector<Coin> coins_of_mask(std::uint32_t mask, int t) {
  std::vector<Coin> c(t);
  for (int r = 0; r < t; ++r) c[r] = (mask >> r) & 1U ? Coin::Tails : Coin::Heads;
  return c;
}

// sigma g sigma^{-1} with sigma the block reversal, as a position -> card table.
std::vector<int> conjugate(const ShuffleParams& p, const DeckState& d) {
  std::vector<int> out(p.n());
  for (int x = 1; x <= p.n(); ++x) out[x - 1] = sigma_reorder(p, d.perm[sigma_reorder(p, x)]);
  return out;
}

}  // namespace

TEST_CASE("single step examples") {
  const ShuffleParams p(5, 3);
  const DeckState id = DeckState::identity(5);
  CHECK(cards_of(step(p, id, Coin::Heads)) == std::vector<int>{3, 1, 2, 4, 5});
  CHECK(cards_of(step(p, id, Coin::Tails)) == std::vector<int>{5, 1, 2, 3, 4});
  CHECK(cards_of(step(p, DeckState::from_perm({0, 3, 1, 2, 4, 5}), Coin::Tails)) == std::vector<int>{5, 3, 1, 2, 4});
  for (int pos = 1; pos <= 5; ++pos)
    for (Coin c : {Coin::Heads, Coin::Tails}) {
      CHECK(step(p, id, c).inv[pos] == card_step(p, pos, c));
      CHECK(inverse_card_step(5, 3, card_step(p, pos, c), c) == pos);
    }
}

TEST_CASE("ring deck matches the reference deck") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = std::uniform_int_distribution<int>(3, 80)(rng);
    const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
    const ShuffleParams p(n, m);
    const auto coins = uniform_coins(rng(), 600);
    Deck fast(p);
    DeckState ref = DeckState::identity(n);
    for (Coin c : coins) {
      fast.step(c);
      ref = step(p, ref, c);
      REQUIRE(ref.consistent());
      for (int pos = 1; pos <= n; ++pos) {
        CHECK(fast.card_at(pos) == ref.perm[pos]);
        CHECK(fast.position_of(ref.perm[pos]) == pos);
      }
    }
    CHECK(fast.state() == ref);
    CHECK(run(p, coins, coins.size()) == ref);
  }
}

TEST_CASE("sign structure") {
  std::mt19937_64 rng(43);
  CHECK(run(ShuffleParams(7, 3), {}, 0) == DeckState::identity(7));
  for (int rep = 0; rep < 200; ++rep) {
    const int t = std::uniform_int_distribution<int>(0, 50)(rng);
    const auto coins = uniform_coins(rng(), t);
    CHECK(run(ShuffleParams(9, 5), coins, t).sign() == 1);
    CHECK(run(ShuffleParams(8, 4), coins, t).sign() == (t % 2 ? -1 : 1));
  }
}

TEST_CASE("inverse shuffle law by enumeration") {
  {
    const ShuffleParams p(5, 3);
    const std::vector<Coin> h{Coin::Heads};
    CHECK(run_inverse(p, h, 0) == DeckState::identity(5));
    // (m, m-1, ..., 1) applied: each top card moves up one, the card at 1 goes to m
    CHECK(cards_of(run_inverse(p, h, 1)) == std::vector<int>{2, 3, 1, 4, 5});
  }
  for (int n : {4, 5}) {
    for (int m = 2; m < n; ++m) {
      const ShuffleParams p(n, m);
      for (int t = 0; t <= 6; ++t) {
        std::map<std::vector<int>, int> inv, conj;
        for (std::uint32_t mask = 0; mask < (1U << t); ++mask) {
          const auto coins = coins_of_mask(mask, t);
          ++inv[cards_of(run_inverse(p, coins, t))];
          ++conj[conjugate(p, run(p, coins, t))];
          CHECK(run_inverse(p, coins, t) == run(p, coins, t).inverse());
        }
        CHECK(inv == conj);
      }
    }
  }
}

TEST_CASE("single card trajectory rules") {
  const ShuffleParams p(20, 8);
  const auto coins = uniform_coins(3, 10);
  const auto tr = track_position(p, 2, coins, 6);
  for (int r = 0; r <= 6; ++r) CHECK(tr.path[r] == 2 + r);

  auto at_m = track_position(p, 8, coins_from_string("H"), 1);
  CHECK(at_m.path[1] == 1);
  CHECK(at_m.heads_B == 1);
  auto at_n = track_position(p, 20, coins_from_string("T"), 1);
  CHECK(at_n.path[1] == 1);
  CHECK(at_n.tails_S == 1);
}

TEST_CASE("movement identity on random traces") {
  std::mt19937_64 rng(47);
  for (int rep = 0; rep < 2000; ++rep) {
    const int n = std::uniform_int_distribution<int>(10, 300)(rng);
    const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
    const ShuffleParams p(n, m);
    const int t = std::uniform_int_distribution<int>(0, 10 * n)(rng);
    const int card = std::uniform_int_distribution<int>(1, n)(rng);
    const auto coins = uniform_coins(rng(), t);
    const auto tr = track_card(p, card, coins, t);
    REQUIRE(verify_movement_identity(tr, p).pass);
    if (rep == 0) CHECK(verify_movement_identity(track_card(p, card, coins, 0), p).pass);
  }
}

TEST_CASE("corrupted trace is caught at the corrupted step") {
  const ShuffleParams p(30, 12);
  const auto coins = uniform_coins(9, 200);
  auto tr = track_position(p, 1, coins, 200);
  std::size_t r = 0;
  while (tr.uses[r] != CoinUse::None) ++r;
  tr.uses[r] = CoinUse::HeadsB;
  const auto chk = verify_movement_identity(tr, p);
  CHECK_FALSE(chk.pass);
  CHECK(chk.step == static_cast<std::int64_t>(r + 1));
}

TEST_CASE("movement bound") {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = std::uniform_int_distribution<int>(10, 40)(rng);
    const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
    const ShuffleParams p(n, m);
    const int t = std::uniform_int_distribution<int>(n, 5 * n * n)(rng);
    const auto coins = uniform_coins(rng(), t);
    const auto tr = track_card(p, std::uniform_int_distribution<int>(1, n)(rng), coins, t);
    CHECK(verify_movement_bound(tr, p, 0).pass);
    CHECK(verify_movement_bound(tr, p, t).pass);
  }
  const ShuffleParams p(50, 20);
  const std::vector<Coin> tails(2000, Coin::Tails);
  const auto tr = track_position(p, 20, tails, 2000);
  for (std::int64_t t : {1, 10, 100, 1000, 2000}) CHECK(verify_movement_bound(tr, p, t).pass);
}

TEST_CASE("pair identity") {
  const ShuffleParams p(40, 17);
  const auto coins = uniform_coins(5, 3000);
  CHECK(verify_pair_identity(track_card(p, 3, coins, 3000), track_card(p, 30, coins, 3000), p).pass);
}

TEST_CASE("collision detection") {
  const ShuffleParams p(10, 4);
  CHECK(detect_collisions(p, coins_from_string("HH"), 0).empty());
  CHECK(detect_collisions(p, coins_from_string("TT"), 0).empty());
  const auto e = detect_collisions(p, coins_from_string("HT"), 0);
  REQUIRE(e.size() == 1);
  CHECK(e[0].time == 0);
  CHECK(e[0].cards == std::array<int, 3>{3, 4, 10});
  CHECK(e[0].three_cycle);
  CHECK_FALSE(detect_collisions(p, coins_from_string("TH"), 0)[0].three_cycle);

  // HT and TH differ by a 3-cycle on the cards at (m-1, m, n)
  Deck d(p), q(p);
  d.step(Coin::Heads);
  d.step(Coin::Tails);
  q.step(Coin::Tails);
  q.step(Coin::Heads);
  int moved = 0;
  for (int c = 1; c <= 10; ++c) moved += d.position_of(c) != q.position_of(c);
  CHECK(moved == 3);
  for (int c : {3, 4, 10}) CHECK(d.position_of(c) != q.position_of(c));

  const std::int64_t t_max = 200000;
  const auto coins = uniform_coins(77, t_max + 2);
  const auto all = detect_collisions(ShuffleParams(100, 50), coins, t_max);
  const std::int64_t slots = t_max / 2 + 1;
  auto [lo, hi] = wilson_interval(static_cast<std::int64_t>(all.size()), slots, 4.0);
  CHECK(lo <= 0.5);
  CHECK(hi >= 0.5);
}

TEST_CASE("matches") {
  const ShuffleParams p(10, 4);
  RunRecord rec;
  CHECK(first_match_after(p, rec, 0, 100, 5).front == 5);
  CHECK_FALSE(first_match_after(p, rec, 0, 100, 5).matched);

  rec.events = {CollisionEvent{4, {5, 6, 7}, true}};
  auto m = first_match_after(p, rec, 0, 100, 5);
  CHECK(m.matched);
  CHECK(m.front == 6);
  CHECK(m.back == 7);
  m = first_match_after(p, rec, 0, 100, 7);
  CHECK(m.front == 5);
  CHECK(m.back == 6);

  rec.events = {CollisionEvent{2, {6, 1, 2}, false}, CollisionEvent{4, {5, 6, 7}, true}};
  m = first_match_after(p, rec, 0, 100, 5);
  CHECK_FALSE(m.matched);
  CHECK(m.front == 5);
  CHECK(m.back == 5);
  // the earlier event is outside (T, t]
  CHECK(first_match_after(p, rec, 2, 100, 5).matched);
}
