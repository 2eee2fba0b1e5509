#include "ocshuffle/coupling.hpp"

#include <cstdlib>
#include <random>
#include <sstream>

#include "ocshuffle/metric.hpp"

namespace ocs {

namespace {

constexpr std::uint8_t bit(int q) { return static_cast<std::uint8_t>(1U << q); }
constexpr std::uint8_t kPrimedFree = 8;

int member_index(std::uint8_t members) {
  for (int q = 0; q < 3; ++q)
    if (members == bit(q)) return q;
  return -1;
}

}  // namespace

PoolLabel route(const ShuffleParams& p, const RouterConfig& cfg, const Triple& pos) {
  for (int q = 0; q < 3; ++q)
    if (pos[q] == p.m()) return {PoolKind::B, bit(q)};
  std::uint8_t bottom = 0;
  for (int q = 0; q < 3; ++q)
    if (pos[q] > p.m()) bottom |= bit(q);

  switch (cfg.role) {
    case RouterRole::Plain:
      return bottom ? PoolLabel{PoolKind::S, bottom} : PoolLabel{PoolKind::Free, 0};
    case RouterRole::Primed:
      for (int q = 0; q < 3; ++q)
        if (bottom & bit(q)) return {PoolKind::S, bit(q)};
      return {PoolKind::Free, kPrimedFree};
    case RouterRole::Unprimed:
      break;
  }
  switch (cfg.phase) {
    case 1:
      return bottom ? PoolLabel{PoolKind::X, bottom} : PoolLabel{PoolKind::Free, 0};
    case 2:
      if (bottom & bit(0)) return {PoolKind::Kappa, bit(0)};
      if (bottom) return {PoolKind::Y, bottom};
      return {PoolKind::Free, 0};
    case 3:
      if (bottom & bit(0)) return {PoolKind::Kappa, bit(0)};
      if (bottom & bit(1)) return {PoolKind::Kappa, bit(1)};
      if (bottom & bit(2)) return {PoolKind::Z, bit(2)};
      return {PoolKind::Free, 0};
    default:
      for (int q = 0; q < 3; ++q)
        if (bottom & bit(q)) return {PoolKind::Kappa, bit(q)};
      return {PoolKind::Free, 0};
  }
}

PoolLabel route_coins(const RouterConfig& cfg, const ShuffleParams& p, const Deck& deck,
                      std::span<const int> tracked_cards) {
  if (tracked_cards.size() > 3) throw InvalidArgument("at most three tracked cards");
  Triple pos{};
  for (std::size_t q = 0; q < tracked_cards.size(); ++q) {
    for (std::size_t r = 0; r < q; ++r)
      if (tracked_cards[r] == tracked_cards[q]) throw InvalidArgument("tracked cards must be distinct");
    pos[q] = deck.position_of(tracked_cards[q]);
  }
  return route(p, cfg, pos);
}

Coin CoinSource::coin(PoolLabel label, std::uint64_t index) const {
  auto it = scripted_.find({label.key(), index});
  if (it != scripted_.end()) return it->second;
  return coin_at(seed_, label.key(), index);
}

void CoinSource::script(PoolLabel label, std::uint64_t first_index, const std::vector<Coin>& coins) {
  for (std::size_t r = 0; r < coins.size(); ++r) scripted_[{label.key(), first_index + r}] = coins[r];
}

CoupledShuffle::CoupledShuffle(const ShuffleParams& p, CoinSource source, const Triple& unprimed,
                               const Triple& primed)
    : params_(p), source_(std::move(source)), pos_u_(unprimed), pos_p_(primed) {}

void CoupledShuffle::apply_skip_rules() {
  const int m = params_.m();
  for (int q = 0; q < 3; ++q) {
    if (pos_p_[q] <= m && m < pos_u_[q]) b_u_[q] = 1;
    if (pos_u_[q] <= m && m < pos_p_[q]) b_p_[q] = 1;
  }
}

void CoupledShuffle::force_phase(int phase) {
  if (phase < 1 || phase > 4) throw InvalidArgument("phase must lie in 1..4");
  for (int q = 0; q < phase - 1; ++q) {
    if (pos_u_[q] != pos_p_[q]) throw InvalidArgument("forced phase needs coupled cards to coincide");
    kappa_u_[q] = s_p_[q];
    tau_[q] = time_;
  }
  phase_ = phase;
}

bool CoupledShuffle::straddling() const {
  for (int q = 0; q < 3; ++q)
    if (b_u_[q] != b_p_[q]) return true;
  return false;
}

Coin CoupledShuffle::draw_u(PoolLabel label) {
  const int q = member_index(label.members);
  switch (label.kind) {
    case PoolKind::B: return source_.coin(label, b_u_[q]++);
    case PoolKind::Kappa: return source_.coin({PoolKind::S, label.members}, kappa_u_[q]++);
    case PoolKind::X: return source_.coin(label, x_u_[label.members]++);
    case PoolKind::Y: return source_.coin(label, y_u_[label.members]++);
    case PoolKind::Z: return source_.coin(label, z_u_[label.members]++);
    default: return source_.coin(label, free_u_++);
  }
}

Coin CoupledShuffle::draw_p(PoolLabel label) {
  const int q = member_index(label.members);
  switch (label.kind) {
    case PoolKind::B: return source_.coin(label, b_p_[q]++);
    case PoolKind::S: return source_.coin(label, s_p_[q]++);
    default: return source_.coin(label, free_p_++);
  }
}

CoupleStep CoupledShuffle::step() {
  CoupleStep rec;
  rec.pool_p = route(params_, {RouterRole::Primed, phase_}, pos_p_);
  rec.coin_p = draw_p(rec.pool_p);
  rec.pool_u = route(params_, {RouterRole::Unprimed, phase_}, pos_u_);
  rec.coin_u = draw_u(rec.pool_u);
  for (int q = 0; q < 3; ++q) {
    if (pos_u_[q]) pos_u_[q] = card_step(params_, pos_u_[q], rec.coin_u);
    if (pos_p_[q]) pos_p_[q] = card_step(params_, pos_p_[q], rec.coin_p);
  }
  ++time_;
  check_coupled();
  try_advance();
  rec.step = time_;
  rec.pos_u = pos_u_;
  rec.pos_p = pos_p_;
  rec.phase = phase_;
  return rec;
}

void CoupledShuffle::check_coupled() {
  const bool open = straddling();
  for (int q = 0; q < phase_ - 1; ++q) {
    if (open) {
      max_offset_ = std::max(max_offset_, std::abs(pos_u_[q] - pos_p_[q]));
      continue;
    }
    if (broken_[q]) continue;
    if (pos_u_[q] != pos_p_[q]) {
      broken_[q] = true;
      decouplings_.push_back({time_, q, "positions still differ after the straddle at m resolved"});
    } else if (kappa_u_[q] != s_p_[q]) {
      broken_[q] = true;
      decouplings_.push_back({time_, q, "small-coin cursors misaligned"});
    }
  }
}

void CoupledShuffle::try_advance() {
  while (phase_ < 4) {
    if (straddling()) return;
    const int c = phase_ - 1;
    for (int q = 0; q < c; ++q)
      if (pos_u_[q] != pos_p_[q] || kappa_u_[q] != s_p_[q]) return;
    if (pos_u_[c] != pos_p_[c]) return;
    kappa_u_[c] = s_p_[c];
    tau_[c] = time_;
    ++phase_;
  }
}

CoupleReport coupled_run(const ShuffleParams& p, const CoupleConfig& cfg) {
  const Triple& cards = cfg.cards;
  for (int q = 0; q < 3; ++q) {
    if (cards[q] < 1 || cards[q] > p.n()) throw InvalidArgument("tracked position out of range");
    for (int r = 0; r < q; ++r)
      if (cards[q] == cards[r]) throw InvalidArgument("tracked cards must be distinct");
  }
  if (cfg.horizon < 0) throw InvalidArgument("horizon must be nonnegative");
  if (cfg.check_separation) {
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        double d = norm(p, position_weight(p, cards[a]) - position_weight(p, cards[b])).value;
        if (!(d > cfg.spread_factor * cfg.ell))
          throw InvalidArgument("tracked cards are not separated by spread_factor * ell in the lattice norm");
      }
  }

  Triple primed{};
  if (cfg.counterparts) {
    primed = *cfg.counterparts;
    for (int q = 0; q < 3; ++q) {
      if (primed[q] < 1 || primed[q] > p.n()) throw InvalidArgument("counterpart out of range");
      for (int r = 0; r < q; ++r)
        if (primed[q] == primed[r]) throw InvalidArgument("counterparts must be distinct");
    }
  } else {
    std::mt19937_64 rng(mix64(cfg.seed ^ 0x5EEDC0FFEEULL));
    for (int q = 0; q < 3; ++q) {
      std::vector<int> cand;
      for (int x = 1; x <= p.n(); ++x) {
        bool used = false;
        for (int r = 0; r < q; ++r) used |= primed[r] == x;
        if (used) continue;
        if (static_cast<double>(m_distance(p, position_weight(p, x) - position_weight(p, cards[q]))) <=
            cfg.counterpart_radius * cfg.ell)
          cand.push_back(x);
      }
      if (cand.empty()) throw InvalidArgument("no counterpart position within the sampling radius");
      std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
      primed[q] = cand[pick(rng)];
    }
  }

  CoupledShuffle eng(p, CoinSource(cfg.seed), cards, primed);
  eng.apply_skip_rules();
  eng.try_advance();

  CoupleReport rep;
  rep.cards = cards;
  rep.counterparts = primed;
  rep.coins_u.reserve(cfg.horizon);
  rep.coins_p.reserve(cfg.horizon);
  if (cfg.keep_trace) {
    CoupleStep start;
    start.pos_u = cards;
    start.pos_p = primed;
    start.phase = eng.phase();
    rep.trace.push_back(start);
  }
  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    CoupleStep s = eng.step();
    rep.coins_u.push_back(s.coin_u);
    rep.coins_p.push_back(s.coin_p);
    if (cfg.keep_trace) rep.trace.push_back(s);
  }
  rep.tau = eng.tau();
  rep.decouplings = eng.decouplings();
  rep.max_straddle_offset = eng.max_straddle_offset();
  rep.straddle_offset_within_one = rep.max_straddle_offset <= 1;
  rep.final_u = eng.unprimed();
  rep.final_p = eng.primed();
  rep.steps = eng.time();
  rep.success = eng.phase() == 4 && rep.decouplings.empty() && rep.final_u == rep.final_p;
  return rep;
}

WorkedExampleReplay replay_worked_example(const ShuffleParams& p) {
  const int m = p.m();
  if (m < 4 || p.n() < m + 110) throw InvalidArgument("worked example needs m >= 4 and n >= m + 110");
  CoinSource src(0);
  src.script({PoolKind::B, bit(1)}, 0, {Coin::Tails});
  src.script({PoolKind::S, bit(0)}, 0, {Coin::Heads, Coin::Tails, Coin::Heads, Coin::Tails});
  const Triple u{m + 100, m, m + 50};
  const Triple pr{m + 100, m - 3, m + 50};
  CoupledShuffle eng(p, src, u, pr);
  eng.force_phase(2);

  WorkedExampleReplay out;
  CoupleStep start;
  start.pos_u = u;
  start.pos_p = pr;
  start.phase = eng.phase();
  out.rows.push_back(start);
  for (int s = 0; s < 5; ++s) out.rows.push_back(eng.step());
  out.expected = {{m + 100, m, m + 100, m - 3},     {m + 101, m + 1, m + 100, m - 2},
                  {m + 101, m + 1, m + 101, m - 1}, {m + 102, m + 2, m + 101, m},
                  {m + 102, m + 2, m + 102, m + 1}, {m + 103, m + 3, m + 103, m + 2}};
  out.matches = true;
  for (std::size_t r = 0; r < out.rows.size(); ++r) {
    const auto& row = out.rows[r];
    std::array<int, 4> got{row.pos_u[0], row.pos_u[1], row.pos_p[0], row.pos_p[1]};
    if (got != out.expected[r]) out.matches = false;
  }
  return out;
}

std::string couple_trace_csv(const std::vector<CoupleStep>& rows) {
  std::ostringstream os;
  os << "step,coin_u,coin_p,pool_u,pool_p,i,j,k,i',j',k',phase\n";
  for (const auto& r : rows) {
    const bool start = r.step == 0;
    os << r.step << ',' << (start ? '-' : to_char(r.coin_u)) << ',' << (start ? '-' : to_char(r.coin_p)) << ','
       << (start ? "-" : to_string(r.pool_u)) << ',' << (start ? "-" : to_string(r.pool_p));
    for (int v : r.pos_u) os << ',' << v;
    for (int v : r.pos_p) os << ',' << v;
    os << ',' << r.phase << '\n';
  }
  return os.str();
}

}  // namespace ocs
