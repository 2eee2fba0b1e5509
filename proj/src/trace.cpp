#include "ocshuffle/trace.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "ocshuffle/deck.hpp"
#include "ocshuffle/metric.hpp"

namespace ocs {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

CoinUse coin_use(const ShuffleParams& p, int pos, Coin c) {
  if (pos == p.m()) return c == Coin::Heads ? CoinUse::HeadsB : CoinUse::TailsB;
  if (pos > p.m()) return c == Coin::Heads ? CoinUse::HeadsS : CoinUse::TailsS;
  return CoinUse::None;
}

void CardTrace::push(int next_pos, CoinUse u) {
  path.push_back(next_pos);
  uses.push_back(u);
  switch (u) {
    case CoinUse::HeadsB: ++heads_B; break;
    case CoinUse::TailsB: ++tails_B; break;
    case CoinUse::HeadsS: ++heads_S; break;
    case CoinUse::TailsS: ++tails_S; break;
    case CoinUse::None: break;
  }
}

CardTrace track_position(const ShuffleParams& p, int start, std::span<const Coin> coins, std::size_t t) {
  if (start < 1 || start > p.n()) throw InvalidArgument("start position out of range");
  if (coins.size() < t) throw InvalidArgument("not enough coins for the requested horizon");
  CardTrace tr;
  tr.card = start;
  tr.path.reserve(t + 1);
  tr.uses.reserve(t);
  tr.path.push_back(start);
  int pos = start;
  for (std::size_t r = 0; r < t; ++r) {
    CoinUse u = coin_use(p, pos, coins[r]);
    pos = card_step(p, pos, coins[r]);
    tr.push(pos, u);
  }
  return tr;
}

CardTrace track_card(const ShuffleParams& p, int card, std::span<const Coin> coins, std::size_t t) {
  return track_position(p, card, coins, t);
}

namespace {

struct Counters {
  std::int64_t hb = 0, tb = 0, hs = 0, ts = 0;
  void add(CoinUse u) {
    switch (u) {
      case CoinUse::HeadsB: ++hb; break;
      case CoinUse::TailsB: ++tb; break;
      case CoinUse::HeadsS: ++hs; break;
      case CoinUse::TailsS: ++ts; break;
      case CoinUse::None: break;
    }
  }
};

std::string describe(std::int64_t r, const Counters& c, int pos) {
  return "step " + std::to_string(r) + ": position " + std::to_string(pos) + " H_B=" + std::to_string(c.hb) +
         " T_B=" + std::to_string(c.tb) + " H_S=" + std::to_string(c.hs) + " T_S=" + std::to_string(c.ts);
}

}  // namespace

TraceCheck verify_movement_identity(const CardTrace& trace, const ShuffleParams& p) {
  const std::int64_t M = p.modulus();
  if (trace.path.size() != trace.uses.size() + 1) return {false, 0, "path and coin records disagree in length"};
  const std::int64_t p0 = position_weight(p, trace.path[0]);
  Counters c;
  for (std::size_t r = 0; r < trace.path.size(); ++r) {
    if (r > 0) c.add(trace.uses[r - 1]);
    const std::int64_t rhs = p0 + static_cast<std::int64_t>(r) + (c.ts - c.hs) + (c.tb - p.m() * c.hb);
    const std::int64_t lhs = position_weight(p, trace.path[r]);
    if (reduce_mod(lhs - rhs, M) != 0)
      return {false, static_cast<std::int64_t>(r), describe(static_cast<std::int64_t>(r), c, trace.path[r])};
  }
  return {};
}

TraceCheck verify_movement_bound(const CardTrace& trace, const ShuffleParams& p, std::int64_t t) {
  if (t < 0 || t > trace.steps()) return {false, t, "horizon outside the trace"};
  Counters c;
  for (std::int64_t r = 0; r < t; ++r) c.add(trace.uses[r]);
  const std::int64_t n = p.n(), m = p.m();
  const std::int64_t x = c.hs - c.ts;  // Diff of the S record, Heads minus Tails
  const std::int64_t y = c.hb - c.tb;  // Diff of the B record
  const std::int64_t laps = t / (2 * n);
  const std::int64_t big = floor_div(y * (2 * n - m), 2 * n);
  const std::int64_t predicted = t - laps * (m - 1) - x - big * m;
  const std::int64_t moved = position_weight(p, trace.path[t]) - position_weight(p, trace.path[0]);
  const double lhs = norm(p, moved - predicted).value;
  const double rt = std::sqrt(static_cast<double>(n));
  const double rhs = std::fabs(y / 2.0) + std::fabs(static_cast<double>(x) / (2.0 * n)) * (rt + 1.0) + 4.0 * rt;
  if (lhs <= rhs + kNormTieTolerance) return {};
  return {false, t,
          describe(t, c, trace.path[t]) + " norm " + std::to_string(lhs) + " exceeds " + std::to_string(rhs)};
}

TraceCheck verify_pair_identity(const CardTrace& a, const CardTrace& b, const ShuffleParams& p) {
  const std::int64_t M = p.modulus();
  const std::size_t len = std::min(a.path.size(), b.path.size());
  const std::int64_t d0 = position_weight(p, b.path[0]) - position_weight(p, a.path[0]);
  Counters ca, cb;
  for (std::size_t r = 0; r < len; ++r) {
    if (r > 0) {
      ca.add(a.uses[r - 1]);
      cb.add(b.uses[r - 1]);
    }
    const std::int64_t rhs = d0 + (cb.ts - cb.hs) - (ca.ts - ca.hs) + (cb.tb - ca.tb) - p.m() * (cb.hb - ca.hb);
    const std::int64_t lhs = position_weight(p, b.path[r]) - position_weight(p, a.path[r]);
    if (reduce_mod(lhs - rhs, M) != 0)
      return {false, static_cast<std::int64_t>(r), "pair identity broken at step " + std::to_string(r)};
  }
  return {};
}

}  // namespace ocs
