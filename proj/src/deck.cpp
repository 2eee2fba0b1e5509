#include "ocshuffle/deck.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace ocs {

bool DeckState::consistent() const {
  if (perm.size() != inv.size() || perm.empty()) return false;
  const int n = this->n();
  for (int pos = 1; pos <= n; ++pos) {
    int c = perm[pos];
    if (c < 1 || c > n || inv[c] != pos) return false;
  }
  return true;
}

int DeckState::sign() const {
  const int n = this->n();
  std::vector<char> seen(n + 1, 0);
  int transpositions = 0;
  for (int s = 1; s <= n; ++s) {
    if (seen[s]) continue;
    int len = 0;
    for (int x = s; !seen[x]; x = perm[x]) {
      seen[x] = 1;
      ++len;
    }
    transpositions += len - 1;
  }
  return transpositions % 2 == 0 ? 1 : -1;
}

DeckState DeckState::identity(int n) {
  DeckState d;
  d.perm.resize(n + 1);
  for (int i = 0; i <= n; ++i) d.perm[i] = i;
  d.inv = d.perm;
  return d;
}

DeckState DeckState::from_perm(std::vector<int> perm_1based) {
  DeckState d;
  d.perm = std::move(perm_1based);
  d.inv.assign(d.perm.size(), 0);
  for (int pos = 1; pos < static_cast<int>(d.perm.size()); ++pos) {
    int c = d.perm[pos];
    if (c < 1 || c >= static_cast<int>(d.perm.size()) || d.inv[c] != 0)
      throw InvalidArgument("not a permutation of 1..n");
    d.inv[c] = pos;
  }
  return d;
}

DeckState step(const ShuffleParams& p, DeckState deck, Coin c) {
  const int last = c == Coin::Heads ? p.m() : p.n();
  // perm[1..last] rotates right by one
  std::rotate(deck.perm.begin() + 1, deck.perm.begin() + last, deck.perm.begin() + last + 1);
  for (int pos = 1; pos <= last; ++pos) deck.inv[deck.perm[pos]] = pos;
  return deck;
}

Deck::Deck(const ShuffleParams& p) : n_(p.n()), m_(p.m()), nb_(p.n() - p.m()) { reset(); }

Deck::Deck(const ShuffleParams& p, const DeckState& start) : n_(p.n()), m_(p.m()), nb_(p.n() - p.m()) {
  if (start.n() != n_ || !start.consistent()) throw InvalidArgument("start deck does not match n");
  load(start);
}

void Deck::reset() { load(DeckState::identity(n_)); }

void Deck::load(const DeckState& s) {
  top_.assign(m_, 0);
  bot_.assign(nb_, 0);
  slot_.assign(n_ + 1, 0);
  top_off_ = bot_off_ = 0;
  for (int pos = 1; pos <= n_; ++pos) {
    int card = s.perm[pos];
    if (pos <= m_) {
      top_[pos - 1] = card;
      slot_[card] = pos - 1;
    } else {
      bot_[pos - m_ - 1] = card;
      slot_[card] = pos - 1;
    }
  }
}

void Deck::step(Coin c) {
  top_off_ = top_off_ == 0 ? m_ - 1 : top_off_ - 1;
  if (c == Coin::Heads) return;
  bot_off_ = bot_off_ == 0 ? nb_ - 1 : bot_off_ - 1;
  int& a = top_[top_off_];
  int& b = bot_[bot_off_];
  std::swap(a, b);
  slot_[a] = top_off_;
  slot_[b] = m_ + bot_off_;
}

DeckState Deck::state() const {
  DeckState d;
  d.perm.assign(n_ + 1, 0);
  d.inv.assign(n_ + 1, 0);
  for (int pos = 1; pos <= n_; ++pos) {
    int card = card_at(pos);
    d.perm[pos] = card;
    d.inv[card] = pos;
  }
  return d;
}

DeckState run(const ShuffleParams& p, std::span<const Coin> coins, std::size_t t) {
  if (coins.size() < t)
    throw InvalidArgument("need " + std::to_string(t) + " coins, got " + std::to_string(coins.size()));
  Deck d(p);
  for (std::size_t s = 0; s < t; ++s) d.step(coins[s]);
  return d.state();
}

DeckState run_inverse(const ShuffleParams& p, std::span<const Coin> coins, std::size_t t) {
  return run(p, coins, t).inverse();
}

}  // namespace ocs
