#pragma once

#include <span>
#include <vector>

#include "ocshuffle/coins.hpp"
#include "ocshuffle/params.hpp"

namespace ocs {

// perm[pos] = card and inv[card] = pos, both 1-based (index 0 unused).
struct DeckState {
  std::vector<int> perm;
  std::vector<int> inv;

  int n() const { return static_cast<int>(perm.size()) - 1; }
  bool operator==(const DeckState&) const = default;
  bool consistent() const;
  int sign() const;  // +1 even, -1 odd
  DeckState inverse() const { return DeckState{inv, perm}; }

  static DeckState identity(int n);
  static DeckState from_perm(std::vector<int> perm_1based);
};

// Where a single card at `pos` goes.
inline int card_step(int n, int m, int pos, Coin c) {
  if (pos < m) return pos + 1;
  if (pos == m) return c == Coin::Heads ? 1 : m + 1;
  if (pos < n) return c == Coin::Tails ? pos + 1 : pos;
  return c == Coin::Tails ? 1 : n;
}
inline int card_step(const ShuffleParams& p, int pos, Coin c) { return card_step(p.n(), p.m(), pos, c); }

// One step of the inverse shuffle: Heads applies (m, m-1, ..., 1), Tails (n, ..., 1).
inline int inverse_card_step(int n, int m, int pos, Coin c) {
  if (pos == 1) return c == Coin::Heads ? m : n;
  if (pos <= m) return pos - 1;
  return c == Coin::Heads ? pos : pos - 1;
}

// Reference deck: plain arrays, O(n) per step. Test oracle for Deck.
DeckState step(const ShuffleParams& p, DeckState deck, Coin c);

// Deck with O(1) steps. Positions 1..m live in a ring of size m and positions
// m+1..n in a ring of size n-m. Heads rotates the top ring. Tails rotates both
// and swaps the two front slots.
class Deck {
 public:
  explicit Deck(const ShuffleParams& p);
  Deck(const ShuffleParams& p, const DeckState& start);

  void reset();  // back to identity
  void step(Coin c);

  int card_at(int pos) const {
    return pos <= m_ ? top_[wrap(top_off_ + pos - 1, m_)] : bot_[wrap(bot_off_ + pos - m_ - 1, nb_)];
  }
  int position_of(int card) const {
    int s = slot_[card];
    if (s < m_) return wrap(s - top_off_, m_) + 1;
    return m_ + wrap(s - m_ - bot_off_, nb_) + 1;
  }

  DeckState state() const;
  int n() const { return n_; }
  int m() const { return m_; }

 private:
  static int wrap(int v, int size) {
    v %= size;
    return v < 0 ? v + size : v;
  }
  void load(const DeckState& s);

  int n_, m_, nb_;
  std::vector<int> top_, bot_;
  std::vector<int> slot_;  // card -> slot, top slots 0..m-1, bottom slots m..n-1
  int top_off_ = 0, bot_off_ = 0;
};

// t steps from the identity deck.
DeckState run(const ShuffleParams& p, std::span<const Coin> coins, std::size_t t);
// Inverse permutation of run(p, coins, t).
DeckState run_inverse(const ShuffleParams& p, std::span<const Coin> coins, std::size_t t);

}  // namespace ocs
