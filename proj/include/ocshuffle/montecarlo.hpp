#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ocshuffle/coins.hpp"
#include "ocshuffle/params.hpp"

namespace ocs {

inline constexpr double kZ95 = 1.959963984540054;

std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials, double z = kZ95);

struct Estimate {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  std::string stop_reason = "max_trials";  // max_trials | half_width | wall_clock
  bool ci_target_met = true;

  double half_width() const { return 0.5 * (ci_hi - ci_lo); }
  static Estimate from_counts(std::int64_t successes, std::int64_t trials);
};

// Trials run in deterministic batches until the Wilson half-width reaches the
// target or max_trials is spent. A wall-clock cap makes the trial count depend
// on timing, so results are only reproducible without it.
struct TrialBudget {
  std::int64_t max_trials = 100000;
  std::int64_t batch = 0;          // 0: one batch of max_trials
  double target_half_width = 0.0;  // 0: no target
  double wall_clock_seconds = 0.0; // 0: no cap
  int workers = 0;                 // 0: OpenMP default
};

// Successes among trials [first, first + count); trial r sees TrialCoins(seed, r).
template <class Trial>
std::int64_t count_successes(std::uint64_t seed, std::int64_t first, std::int64_t count, int workers,
                             const Trial& trial) {
  std::int64_t hits = 0;
#ifdef _OPENMP
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : hits) num_threads(threads)
#endif
  for (std::int64_t r = first; r < first + count; ++r) {
    TrialCoins coins(seed, static_cast<std::uint64_t>(r));
    hits += trial(coins) ? 1 : 0;
  }
  (void)workers;
  return hits;
}

template <class Trial>
std::int64_t count_successes_serial(std::uint64_t seed, std::int64_t first, std::int64_t count, const Trial& trial) {
  std::int64_t hits = 0;
  for (std::int64_t r = first; r < first + count; ++r) {
    TrialCoins coins(seed, static_cast<std::uint64_t>(r));
    hits += trial(coins) ? 1 : 0;
  }
  return hits;
}

template <class Trial>
Estimate run_budgeted(std::uint64_t seed, const TrialBudget& budget, const Trial& trial) {
  if (budget.max_trials < 1) throw InvalidArgument("trial budget must be positive");
  const std::int64_t batch = budget.batch > 0 ? budget.batch : budget.max_trials;
  const auto start = std::chrono::steady_clock::now();
  std::int64_t done = 0, hits = 0;
  std::string reason = "max_trials";
  while (done < budget.max_trials) {
    const std::int64_t count = std::min(batch, budget.max_trials - done);
    hits += count_successes(seed, done, count, budget.workers, trial);
    done += count;
    if (budget.target_half_width > 0.0) {
      auto [lo, hi] = wilson_interval(hits, done);
      if (0.5 * (hi - lo) <= budget.target_half_width) {
        reason = "half_width";
        break;
      }
    }
    if (budget.wall_clock_seconds > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >= budget.wall_clock_seconds) {
      if (done < budget.max_trials) reason = "wall_clock";
      break;
    }
  }
  Estimate e = Estimate::from_counts(hits, done);
  e.stop_reason = reason;
  e.ci_target_met = budget.target_half_width <= 0.0 || e.half_width() <= budget.target_half_width;
  return e;
}

struct ScalingPoint {
  double n = 0.0;
  double p = 0.0;
  double weight = 1.0;
};

struct ScalingFit {
  std::vector<ScalingPoint> points;  // points used
  double exponent = 0.0;
  double intercept = 0.0;  // log p at n = 1
  double stderr_ = 0.0;
  std::vector<std::string> warnings;
};

// Least squares of log p on log n. Zero p is dropped with a warning.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);
// Weighted by inverse delta-method variance of log p_hat, i.e. successes / (1 - p_hat).
ScalingFit fit_scaling_weighted(const std::vector<std::pair<double, Estimate>>& points);

struct ConstantProfile {
  std::string name;
  double spread_factor = 8.0;          // separation multiple of ell for the coupled stage
  double stage1_divisor = 20.0;        // stage-1 landing tolerance ell / divisor
  double diff_cap_wide = 160.0;        // differential band divisors of the spreading proof
  double diff_cap_narrow = 80.0;
  double target_margin = 0.5;          // targets within margin * ell of the cards
  double stage2_fraction = 1.0 / 80.0; // stage-2 scale relative to ell
  double min_ell_factor = 1.0;         // ell >= factor * sqrt(n)
  double stage2_min_ell_factor = 0.0;  // stage-2 scale >= factor * sqrt(n)
  double collide_window = 10.0;        // final window in units of n

  static ConstantProfile paper();
  static ConstantProfile desk();
  static ConstantProfile by_name(const std::string& name);
};

enum class L1Variant { Adjacent, Gap };
const char* to_string(L1Variant v);

struct L1Config {
  L1Variant variant = L1Variant::Adjacent;
  bool control = false;  // empty window
};

// Cards (i, j, k) for the variant: Adjacent (n-2, n-1, n); Gap (n-2, n, n-1).
std::array<int, 3> l1_cards(const ShuffleParams& p, L1Variant v);

// First collision touching i, j or k after T = 2n is the three of them in
// cyclic order (i, k, j) and happens by t = 2n + floor(4 sqrt n).
Estimate estimate_l1_collision(const ShuffleParams& p, const L1Config& cfg, const TrialBudget& budget,
                               std::uint64_t seed);

// Back match of i is j and front match of i is a larger card, window (2n, 2n + 4 sqrt n].
Estimate estimate_match_prob(const ShuffleParams& p, int i, int j, const TrialBudget& budget, std::uint64_t seed,
                             bool control = false);

struct SqrtnConfig {
  std::array<int, 3> positions{};  // start of i, j, k; zeros pick a close triple in (i, k, j) order
  bool adversarial = false;        // spread the cards over the cycle instead
  bool control = false;            // horizon 0
};

std::array<int, 3> sqrtn_start(const ShuffleParams& p, const SqrtnConfig& cfg);

// Next collision of i, j, k is with each other in cyclic order (i, k, j) and
// i's next collision happens within 10n steps.
Estimate estimate_sqrtn_collide(const ShuffleParams& p, const SqrtnConfig& cfg, const TrialBudget& budget,
                                std::uint64_t seed);

struct FullCollidePlan {
  std::array<int, 3> cards{};
  double ell = 0.0;
  double ell_max = 0.0;
  int gamma = 0;
  std::int64_t T1 = 0, T2 = 0, T = 0, t = 0;
};

struct FullCollideConfig {
  double ell = 0.0;
  std::optional<std::array<int, 3>> cards;  // default (1, 2, 3)
  bool control = false;                     // horizon 0
};

// Validates the profile's hypotheses at (n, ell); Infeasible names the one that fails.
FullCollidePlan plan_full_collide(const ShuffleParams& p, const FullCollideConfig& cfg, const ConstantProfile& profile);

// First collision of i after T = 2 T1 + 2 T2 has front j and back k and happens by T + window * n.
Estimate estimate_full_collide(const ShuffleParams& p, const FullCollideConfig& cfg, const ConstantProfile& profile,
                               const TrialBudget& budget, std::uint64_t seed);

struct TargetingPlan {
  std::array<int, 3> cards{};
  std::vector<std::array<int, 3>> targets;
  std::int64_t T = 0;  // cards are compared with targets at time 2T
};

struct TargetingConfig {
  double ell = 0.0;
  std::optional<std::array<int, 3>> cards;  // default: a spread triple found by search
  std::vector<std::array<int, 3>> targets;  // default: the cards themselves
  bool control = false;                     // target two cards onto one position
};

TargetingPlan plan_targeting(const ShuffleParams& p, const TargetingConfig& cfg, const ConstantProfile& profile);

// One estimate per target, all from the same trials.
std::vector<Estimate> estimate_targeting(const ShuffleParams& p, const TargetingConfig& cfg,
                                         const ConstantProfile& profile, const TrialBudget& budget,
                                         std::uint64_t seed);

enum class Direction { Forward, Inverse };
const char* to_string(Direction d);

struct SpreadConfig {
  double ell = 0.0;
  double divisor = 20.0;
  std::array<int, 3> cards{};
  std::array<int, 3> targets{};
  Direction direction = Direction::Forward;
};

// T = select_time_T1(ceil(ell^2)); all three cards within ell / divisor of their targets at T.
Estimate spread_experiment(const ShuffleParams& p, const SpreadConfig& cfg, const TrialBudget& budget,
                           std::uint64_t seed);

struct OccupancyReport {
  Estimate estimate;             // alone-time >= n - m within the horizon
  double bound = 0.0;            // e^{-10n/m} / 8
  double mean_fraction = 0.0;    // alone-time / horizon
  double var_fraction = 0.0;
  std::int64_t horizon = 0;
  bool bound_ok = false;         // p_hat >= bound - half_width
};

// Card i alone in the bottom part while j, k sit in the top part.
OccupancyReport occupancy_alone_bottom(const ShuffleParams& p, const std::array<int, 3>& cards, std::int64_t horizon,
                                       const TrialBudget& budget, std::uint64_t seed);

}  // namespace ocs
