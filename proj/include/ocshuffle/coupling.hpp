#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ocshuffle/coins.hpp"
#include "ocshuffle/deck.hpp"
#include "ocshuffle/params.hpp"

namespace ocs {

using Triple = std::array<int, 3>;  // positions of i, j, k; 0 = not tracked

enum class RouterRole {
  Plain,      // single shuffle: B^x at m, else S^A for the bottom set A
  Primed,     // i', j', k' side of the coupling
  Unprimed,   // i, j, k side of the coupling, rules depend on the phase
};

struct RouterConfig {
  RouterRole role = RouterRole::Plain;
  int phase = 1;  // 1..4, Unprimed only
};

// Pool for the next step given the tracked positions. Free means the tracked
// bookkeeping needs no coin.
PoolLabel route(const ShuffleParams& p, const RouterConfig& cfg, const Triple& pos);
PoolLabel route_coins(const RouterConfig& cfg, const ShuffleParams& p, const Deck& deck,
                      std::span<const int> tracked_cards);

// Pool coins, with optional scripted overrides for golden tests.
class CoinSource {
 public:
  explicit CoinSource(std::uint64_t seed) : seed_(seed) {}
  Coin coin(PoolLabel label, std::uint64_t index) const;
  void script(PoolLabel label, std::uint64_t first_index, const std::vector<Coin>& coins);

 private:
  std::uint64_t seed_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, Coin> scripted_;
};

struct CoupleStep {
  std::int64_t step = 0;  // 1-based, positions are after this step
  Coin coin_u = Coin::Heads, coin_p = Coin::Heads;
  PoolLabel pool_u, pool_p;
  Triple pos_u{}, pos_p{};
  int phase = 1;
};

struct DecouplingEvent {
  std::int64_t time = 0;
  int card = 0;  // 0 = i, 1 = j, 2 = k
  std::string cause;
};

// Two coupled shuffles following the tracked cards only. Cursor bookkeeping:
// B^x and S^x are shared streams read at separate cursors by each side; the
// unprimed kappa^x reads S^x from its own cursor once card x has coupled.
class CoupledShuffle {
 public:
  CoupledShuffle(const ShuffleParams& p, CoinSource source, const Triple& unprimed, const Triple& primed);

  // Straddle rule at the start: the side whose card sits above m while the other
  // is below skips B^x_1.
  void apply_skip_rules();
  // Mark cards 0..phase-2 as already coupled at time 0 with aligned cursors.
  void force_phase(int phase);

  CoupleStep step();
  void try_advance();  // phase transitions at the current time

  int phase() const { return phase_; }
  std::int64_t time() const { return time_; }
  const Triple& unprimed() const { return pos_u_; }
  const Triple& primed() const { return pos_p_; }
  const std::array<std::int64_t, 3>& tau() const { return tau_; }
  const std::vector<DecouplingEvent>& decouplings() const { return decouplings_; }
  int max_straddle_offset() const { return max_offset_; }
  bool straddling() const;

 private:
  Coin draw_u(PoolLabel label);
  Coin draw_p(PoolLabel label);
  void check_coupled();

  ShuffleParams params_;
  CoinSource source_;
  Triple pos_u_, pos_p_;
  int phase_ = 1;
  std::int64_t time_ = 0;
  std::array<std::int64_t, 3> tau_{-1, -1, -1};
  std::array<std::uint64_t, 3> b_u_{}, b_p_{}, s_p_{}, kappa_u_{};
  std::array<std::uint64_t, 8> x_u_{}, y_u_{}, z_u_{};
  std::uint64_t free_u_ = 0, free_p_ = 0;
  std::array<bool, 3> broken_{};
  std::vector<DecouplingEvent> decouplings_;
  int max_offset_ = 0;
};

struct CoupleConfig {
  Triple cards{};                       // starting positions of i, j, k
  std::optional<Triple> counterparts;   // i', j', k'; sampled when empty
  double ell = 1.0;
  double spread_factor = 8.0;           // paper profile: 199
  double counterpart_radius = 8.0;      // counterparts within radius * ell in |.|_M
  bool check_separation = true;
  std::uint64_t seed = 1;
  std::int64_t horizon = 0;
  bool keep_trace = false;
};

struct CoupleReport {
  Triple cards{}, counterparts{};
  std::array<std::int64_t, 3> tau{-1, -1, -1};
  bool success = false;
  std::vector<DecouplingEvent> decouplings;
  int max_straddle_offset = 0;
  bool straddle_offset_within_one = true;
  Triple final_u{}, final_p{};
  std::int64_t steps = 0;
  std::vector<Coin> coins_u, coins_p;  // realised coin per step on each side
  std::vector<CoupleStep> trace;
};

CoupleReport coupled_run(const ShuffleParams& p, const CoupleConfig& cfg);

struct WorkedExampleReplay {
  std::vector<CoupleStep> rows;  // rows[0] is the starting state
  std::vector<std::array<int, 4>> expected;
  bool matches = false;
};

// Scripted five-step scenario: i, i' coupled in phase 2, j at m, j' three above.
WorkedExampleReplay replay_worked_example(const ShuffleParams& p);

// CSV: step,coin_u,coin_p,pool_u,pool_p,i,j,k,i',j',k',phase
std::string couple_trace_csv(const std::vector<CoupleStep>& rows);

}  // namespace ocs
