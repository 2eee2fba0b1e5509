#include "ocshuffle/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocshuffle/deck.hpp"
#include "ocshuffle/metric.hpp"

namespace ocs {

std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (ph + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
  double lo = std::max(0.0, centre - half), hi = std::min(1.0, centre + half);
  if (successes == 0) lo = 0.0;
  if (successes == trials) hi = 1.0;
  return {std::min(lo, ph), std::max(hi, ph)};
}

Estimate Estimate::from_counts(std::int64_t successes, std::int64_t trials) {
  if (successes < 0 || successes > trials) throw InvalidArgument("successes must lie in [0, trials]");
  Estimate e;
  e.trials = trials;
  e.successes = successes;
  e.p_hat = trials > 0 ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  std::tie(e.ci_lo, e.ci_hi) = wilson_interval(successes, trials);
  return e;
}

namespace {

ScalingFit regress(std::vector<ScalingPoint> pts, std::vector<std::string> warnings, bool known_variance) {
  if (pts.size() < 3) throw InvalidArgument("scaling fit needs at least three points with p > 0");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (const auto& q : pts) {
    const double x = std::log(q.n), y = std::log(q.p);
    sw += q.weight;
    sx += q.weight * x;
    sy += q.weight * y;
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& q : pts) {
    const double dx = std::log(q.n) - mx;
    sxx += q.weight * dx * dx;
    sxy += q.weight * dx * (std::log(q.p) - my);
  }
  if (sxx <= 0.0) throw InvalidArgument("scaling fit needs at least two distinct n");
  ScalingFit f;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  if (known_variance) {
    f.stderr_ = std::sqrt(1.0 / sxx);
  } else {
    double ssr = 0.0;
    for (const auto& q : pts) {
      const double r = std::log(q.p) - (f.intercept + f.exponent * std::log(q.n));
      ssr += q.weight * r * r;
    }
    f.stderr_ = pts.size() > 2 ? std::sqrt(ssr / static_cast<double>(pts.size() - 2) / sxx) : 0.0;
  }
  f.points = std::move(pts);
  f.warnings = std::move(warnings);
  return f;
}

}  // namespace

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
  std::vector<ScalingPoint> pts;
  std::vector<std::string> warnings;
  for (auto [n, p] : points) {
    if (!(n > 0.0)) throw InvalidArgument("scaling fit needs n > 0");
    if (!(p > 0.0)) {
      warnings.push_back("dropped n = " + std::to_string(n) + " with p = 0");
      continue;
    }
    pts.push_back({n, p, 1.0});
  }
  return regress(std::move(pts), std::move(warnings), false);
}

ScalingFit fit_scaling_weighted(const std::vector<std::pair<double, Estimate>>& points) {
  std::vector<ScalingPoint> pts;
  std::vector<std::string> warnings;
  for (const auto& [n, e] : points) {
    if (e.successes == 0) {
      warnings.push_back("dropped n = " + std::to_string(n) + " with no successes");
      continue;
    }
    const double w = static_cast<double>(e.successes) / std::max(1e-12, 1.0 - e.p_hat);
    pts.push_back({n, e.p_hat, w});
  }
  return regress(std::move(pts), std::move(warnings), true);
}

ConstantProfile ConstantProfile::paper() {
  ConstantProfile c;
  c.name = "paper";
  c.spread_factor = 199.0;
  c.stage1_divisor = 2000.0;
  c.diff_cap_wide = 16000.0;
  c.diff_cap_narrow = 8000.0;
  c.target_margin = 0.1;
  c.stage2_fraction = 1e-3;
  c.min_ell_factor = 100.0;
  c.stage2_min_ell_factor = 100.0;
  c.collide_window = 10.0;
  return c;
}

ConstantProfile ConstantProfile::desk() {
  ConstantProfile c;
  c.name = "desk";
  return c;
}

ConstantProfile ConstantProfile::by_name(const std::string& name) {
  if (name == "paper") return paper();
  if (name == "desk") return desk();
  throw InvalidArgument("unknown profile '" + name + "' (expected paper or desk)");
}

const char* to_string(L1Variant v) { return v == L1Variant::Adjacent ? "adjacent" : "gap"; }
const char* to_string(Direction d) { return d == Direction::Forward ? "forward" : "inverse"; }

namespace {

// Slot of a position in the collision triple (m-1, m, n), or -1.
inline int collision_slot(int pos, int m, int n) {
  if (pos == m - 1) return 0;
  if (pos == m) return 1;
  if (pos == n) return 2;
  return -1;
}

// Cards at positions a, b, c sit at (m-1, m, n) in this cyclic order.
inline bool cyclic_order(int a, int b, int c, int m, int n) {
  const int sa = collision_slot(a, m, n), sb = collision_slot(b, m, n), sc = collision_slot(c, m, n);
  return sa >= 0 && sb == (sa + 1) % 3 && sc == (sa + 2) % 3;
}

inline bool touches(const std::array<int, 3>& pos, int m, int n) {
  for (int x : pos)
    if (collision_slot(x, m, n) >= 0) return true;
  return false;
}

inline void advance(std::array<int, 3>& pos, int n, int m, Coin c) {
  for (int& x : pos) x = card_step(n, m, x, c);
}

void check_cards(const ShuffleParams& p, const std::array<int, 3>& c) {
  for (int q = 0; q < 3; ++q) {
    if (c[q] < 1 || c[q] > p.n()) throw InvalidArgument("card out of range");
    for (int r = 0; r < q; ++r)
      if (c[q] == c[r]) throw InvalidArgument("tracked cards must be distinct");
  }
}

std::int64_t four_root_window(int n) { return static_cast<std::int64_t>(std::floor(4.0 * std::sqrt(n))); }

}  // namespace

std::array<int, 3> l1_cards(const ShuffleParams& p, L1Variant v) {
  const int n = p.n();
  if (v == L1Variant::Adjacent) return {n - 2, n - 1, n};
  return {n - 2, n, n - 1};
}

Estimate estimate_l1_collision(const ShuffleParams& p, const L1Config& cfg, const TrialBudget& budget,
                               std::uint64_t seed) {
  const int n = p.n(), m = p.m();
  if (n < 9) throw InvalidArgument("collision band (n - sqrt n, n] needs n >= 9");
  if (m < 2 || m > n - 3) throw InvalidArgument("collision setup needs m <= n - 3");
  const std::array<int, 3> start = l1_cards(p, cfg.variant);  // i, j, k
  const std::int64_t T = 2LL * n;
  const std::int64_t t = cfg.control ? T : T + four_root_window(n);
  auto trial = [=](TrialCoins& coins) {
    std::array<int, 3> pos = start;
    for (std::int64_t s = 0; s <= t; s += 2) {
      const Coin a = coins.next(), b = coins.next();
      if (s > T && a != b && touches(pos, m, n)) return cyclic_order(pos[0], pos[2], pos[1], m, n);
      advance(pos, n, m, a);
      advance(pos, n, m, b);
    }
    return false;
  };
  return run_budgeted(seed, budget, trial);
}

Estimate estimate_match_prob(const ShuffleParams& p, int i, int j, const TrialBudget& budget, std::uint64_t seed,
                             bool control) {
  const int n = p.n(), m = p.m();
  const double band = n - std::sqrt(static_cast<double>(n));
  if (!(i > band && j > band && i <= n && j <= n)) throw InvalidArgument("i and j must lie in (n - sqrt n, n]");
  if (i < n - 2) throw InvalidArgument("i must be at least n - 2");
  if (!(i < j)) throw InvalidArgument("need i < j");
  const std::int64_t T = 2LL * n;
  const std::int64_t t = control ? T : T + four_root_window(n);
  auto trial = [=, &p](TrialCoins& coins) {
    Deck deck(p);
    std::vector<int> seen;
    for (std::int64_t s = 0; s <= t; s += 2) {
      const Coin a = coins.next(), b = coins.next();
      if (s > T && a != b) {
        const std::array<int, 3> c{deck.card_at(m - 1), deck.card_at(m), deck.card_at(n)};
        const int at = c[0] == i ? 0 : c[1] == i ? 1 : c[2] == i ? 2 : -1;
        if (at >= 0) {
          const int front = c[(at + 1) % 3], back = c[(at + 2) % 3];
          if (std::find(seen.begin(), seen.end(), front) != seen.end() ||
              std::find(seen.begin(), seen.end(), back) != seen.end())
            return false;
          return back == j && front > i;
        }
        seen.insert(seen.end(), c.begin(), c.end());
      }
      deck.step(a);
      deck.step(b);
    }
    return false;
  };
  return run_budgeted(seed, budget, trial);
}

std::array<int, 3> sqrtn_start(const ShuffleParams& p, const SqrtnConfig& cfg) {
  if (cfg.positions != std::array<int, 3>{}) {
    check_cards(p, cfg.positions);
    return cfg.positions;
  }
  // k sits between i and j: without a collision the cyclic order of three cards never changes
  if (!cfg.adversarial) return {1, 3, 2};
  const std::int64_t M = p.modulus();
  auto at_weight = [&](std::int64_t w) {
    if (w <= p.m()) return static_cast<int>(std::max<std::int64_t>(1, w));
    return static_cast<int>(std::min<std::int64_t>(p.n(), (w + p.m()) / 2));
  };
  return {1, at_weight(1 + M / 3), at_weight(1 + 2 * M / 3)};
}

Estimate estimate_sqrtn_collide(const ShuffleParams& p, const SqrtnConfig& cfg, const TrialBudget& budget,
                                std::uint64_t seed) {
  const int n = p.n(), m = p.m();
  const std::array<int, 3> start = sqrtn_start(p, cfg);
  const std::int64_t limit = cfg.control ? -1 : 10LL * n;
  auto trial = [=](TrialCoins& coins) {
    std::array<int, 3> pos = start;
    for (std::int64_t s = 0; s <= limit; s += 2) {
      const Coin a = coins.next(), b = coins.next();
      if (a != b && touches(pos, m, n)) return cyclic_order(pos[0], pos[2], pos[1], m, n);
      advance(pos, n, m, a);
      advance(pos, n, m, b);
    }
    return false;
  };
  return run_budgeted(seed, budget, trial);
}

FullCollidePlan plan_full_collide(const ShuffleParams& p, const FullCollideConfig& cfg,
                                  const ConstantProfile& profile) {
  if (!(cfg.ell > 0.0)) throw InvalidArgument("ell must be positive");
  FullCollidePlan plan;
  plan.ell = cfg.ell;
  plan.cards = cfg.cards.value_or(std::array<int, 3>{1, 2, 3});
  check_cards(p, plan.cards);
  for (int c : plan.cards)
    if (!(norm(p, position_weight(p, c)).value < cfg.ell))
      throw InvalidArgument("card " + std::to_string(c) + " has norm >= ell");
  const double rt = std::sqrt(static_cast<double>(p.n()));
  plan.ell_max = l_max(p);
  if (cfg.ell > plan.ell_max)
    throw Infeasible("ell = " + std::to_string(cfg.ell) + " exceeds l_max = " + std::to_string(plan.ell_max));
  if (cfg.ell < profile.min_ell_factor * rt)
    throw Infeasible("ell below " + std::to_string(profile.min_ell_factor) + " sqrt(n) required by the " +
                     profile.name + " profile");
  const double inner = profile.stage2_fraction * cfg.ell;
  if (inner < profile.stage2_min_ell_factor * rt)
    throw Infeasible("stage-2 scale " + std::to_string(inner) + " below " +
                     std::to_string(profile.stage2_min_ell_factor) + " sqrt(n)");
  const double separation = cfg.ell / 5.0 - 2.0 * cfg.ell / profile.stage1_divisor;
  if (separation + 1e-12 < profile.spread_factor * inner)
    throw Infeasible("spread separation ell/5 - 2 ell/divisor is below spread_factor times the stage-2 scale");
  const SpreadMode mode = profile.min_ell_factor >= 100.0 ? SpreadMode::Strict : SpreadMode::Relaxed;
  std::optional<SpreadTriple> spread;
  try {
    spread = spread_triple(p, cfg.ell, mode);
  } catch (const InvalidArgument& e) {
    throw Infeasible(std::string("spread triple: ") + e.what());
  }
  if (!spread) throw Infeasible("no spread triple exists at this ell");
  plan.gamma = gamma(p, cfg.ell);
  plan.T1 = select_time_T1(p, static_cast<std::int64_t>(std::ceil(cfg.ell * cfg.ell)));
  plan.T2 = select_time_T2(p, static_cast<std::int64_t>(std::ceil(inner * inner)));
  plan.T = 2 * plan.T1 + 2 * plan.T2;
  plan.t = cfg.control ? plan.T : plan.T + static_cast<std::int64_t>(profile.collide_window * p.n());
  return plan;
}

Estimate estimate_full_collide(const ShuffleParams& p, const FullCollideConfig& cfg, const ConstantProfile& profile,
                               const TrialBudget& budget, std::uint64_t seed) {
  const FullCollidePlan plan = plan_full_collide(p, cfg, profile);
  const int n = p.n(), m = p.m();
  const std::int64_t T = plan.T, t = plan.t;
  const std::array<int, 3> start = plan.cards;
  auto trial = [=](TrialCoins& coins) {
    std::array<int, 3> pos = start;
    for (std::int64_t r = 0; r < T; ++r) advance(pos, n, m, coins.next());
    // collisions count from the first even time strictly after T
    std::int64_t s = T;
    const int lead = (T % 2 == 0) ? 2 : 1;
    for (int r = 0; r < lead; ++r) advance(pos, n, m, coins.next());
    s += lead;
    for (; s <= t; s += 2) {
      const Coin a = coins.next(), b = coins.next();
      if (a != b && collision_slot(pos[0], m, n) >= 0) return cyclic_order(pos[0], pos[1], pos[2], m, n);
      advance(pos, n, m, a);
      advance(pos, n, m, b);
    }
    return false;
  };
  return run_budgeted(seed, budget, trial);
}

TargetingPlan plan_targeting(const ShuffleParams& p, const TargetingConfig& cfg, const ConstantProfile& profile) {
  if (!(cfg.ell > 0.0)) throw InvalidArgument("ell must be positive");
  const double rt = std::sqrt(static_cast<double>(p.n()));
  if (cfg.ell < profile.min_ell_factor * rt)
    throw Infeasible("ell below " + std::to_string(profile.min_ell_factor) + " sqrt(n) required by the " +
                     profile.name + " profile");
  const double sep = profile.spread_factor * cfg.ell;
  auto dist = [&](int a, int b) { return norm(p, position_weight(p, a) - position_weight(p, b)).value; };
  TargetingPlan plan;
  if (cfg.cards) {
    plan.cards = *cfg.cards;
    check_cards(p, plan.cards);
  } else {
    std::vector<int> chosen{1};
    for (int x = 2; x <= p.n() && chosen.size() < 3; ++x) {
      bool ok = true;
      for (int c : chosen) ok = ok && dist(x, c) > sep;
      if (ok) chosen.push_back(x);
    }
    if (chosen.size() < 3) throw Infeasible("no card triple separated by spread_factor * ell");
    plan.cards = {chosen[0], chosen[1], chosen[2]};
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      if (!(dist(plan.cards[a], plan.cards[b]) > sep)) throw Infeasible("cards are not separated by spread_factor * ell");

  if (cfg.control) {
    plan.targets = {{plan.cards[0], plan.cards[0], plan.cards[2]}};
  } else {
    plan.targets = cfg.targets.empty() ? std::vector<std::array<int, 3>>{plan.cards} : cfg.targets;
    for (const auto& f : plan.targets) {
      check_cards(p, f);
      for (int q = 0; q < 3; ++q)
        if (!(dist(plan.cards[q], f[q]) < profile.target_margin * cfg.ell))
          throw Infeasible("target outside target_margin * ell of its card");
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
          if (!(dist(f[a], f[b]) > sep)) throw Infeasible("targets are not separated by spread_factor * ell");
    }
  }
  plan.T = select_time_T2(p, static_cast<std::int64_t>(std::floor(cfg.ell * cfg.ell)) + 1);
  return plan;
}

std::vector<Estimate> estimate_targeting(const ShuffleParams& p, const TargetingConfig& cfg,
                                         const ConstantProfile& profile, const TrialBudget& budget,
                                         std::uint64_t seed) {
  const TargetingPlan plan = plan_targeting(p, cfg, profile);
  const int n = p.n(), m = p.m();
  const std::int64_t horizon = 2 * plan.T;
  const std::size_t k = plan.targets.size();
  std::vector<std::int64_t> hits(k, 0);
  const std::int64_t trials = budget.max_trials;
  if (trials < 1) throw InvalidArgument("trial budget must be positive");
#ifdef _OPENMP
  const int threads = budget.workers > 0 ? budget.workers : omp_get_max_threads();
#pragma omp parallel num_threads(threads)
#endif
  {
    std::vector<std::int64_t> local(k, 0);
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 64)
#endif
    for (std::int64_t r = 0; r < trials; ++r) {
      TrialCoins coins(seed, static_cast<std::uint64_t>(r));
      std::array<int, 3> pos = plan.cards;
      for (std::int64_t s = 0; s < horizon; ++s) advance(pos, n, m, coins.next());
      for (std::size_t q = 0; q < k; ++q) local[q] += pos == plan.targets[q];
    }
#ifdef _OPENMP
#pragma omp critical
#endif
    for (std::size_t q = 0; q < k; ++q) hits[q] += local[q];
  }
  std::vector<Estimate> out;
  for (std::size_t q = 0; q < k; ++q) out.push_back(Estimate::from_counts(hits[q], trials));
  return out;
}

Estimate spread_experiment(const ShuffleParams& p, const SpreadConfig& cfg, const TrialBudget& budget,
                           std::uint64_t seed) {
  if (!(cfg.ell > 0.0)) throw InvalidArgument("ell must be positive");
  if (!(cfg.divisor >= 1.0)) throw InvalidArgument("divisor must be at least 1");
  check_cards(p, cfg.cards);
  check_cards(p, cfg.targets);
  const std::vector<double> table = norm_table(p);
  const std::int64_t M = p.modulus();
  auto dist = [&](int a, int b) { return table[reduce_mod(position_weight(p, a) - position_weight(p, b), M)]; };
  for (int q = 0; q < 3; ++q)
    if (dist(cfg.cards[q], cfg.targets[q]) > 2.0 * cfg.ell + kNormTieTolerance)
      throw InvalidArgument("targets must lie within 2 ell of the cards");
  const int n = p.n(), m = p.m();
  const std::int64_t T = select_time_T1(p, static_cast<std::int64_t>(std::ceil(cfg.ell * cfg.ell)));
  const double radius = cfg.ell / cfg.divisor;
  const bool inverse = cfg.direction == Direction::Inverse;
  auto trial = [&, T, radius, inverse, n, m](TrialCoins& coins) {
    std::array<int, 3> pos = cfg.cards;
    for (std::int64_t s = 0; s < T; ++s) {
      const Coin c = coins.next();
      for (int& x : pos) x = inverse ? inverse_card_step(n, m, x, c) : card_step(n, m, x, c);
    }
    for (int q = 0; q < 3; ++q)
      if (!(dist(pos[q], cfg.targets[q]) < radius)) return false;
    return true;
  };
  return run_budgeted(seed, budget, trial);
}

OccupancyReport occupancy_alone_bottom(const ShuffleParams& p, const std::array<int, 3>& cards, std::int64_t horizon,
                                       const TrialBudget& budget, std::uint64_t seed) {
  check_cards(p, cards);
  if (horizon < 1) throw InvalidArgument("horizon must be positive");
  const int n = p.n(), m = p.m();
  const std::int64_t need = n - m;
  const std::int64_t trials = budget.max_trials;
  if (trials < 1) throw InvalidArgument("trial budget must be positive");
  std::int64_t hits = 0, sum = 0, sum_sq = 0;
#ifdef _OPENMP
  const int threads = budget.workers > 0 ? budget.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : hits, sum, sum_sq) num_threads(threads)
#endif
  for (std::int64_t r = 0; r < trials; ++r) {
    TrialCoins coins(seed, static_cast<std::uint64_t>(r));
    std::array<int, 3> pos = cards;
    std::int64_t alone = 0;
    for (std::int64_t s = 0; s < horizon; ++s) {
      advance(pos, n, m, coins.next());
      alone += (pos[0] > m && pos[1] < m && pos[2] < m) ? 1 : 0;
    }
    hits += alone >= need ? 1 : 0;
    sum += alone;
    sum_sq += alone * alone;
  }
  OccupancyReport rep;
  rep.estimate = Estimate::from_counts(hits, trials);
  rep.horizon = horizon;
  rep.bound = std::exp(-10.0 * n / m) / 8.0;
  const double tn = static_cast<double>(trials), h = static_cast<double>(horizon);
  rep.mean_fraction = static_cast<double>(sum) / tn / h;
  const double mean_alone = static_cast<double>(sum) / tn;
  rep.var_fraction = trials > 1 ? (static_cast<double>(sum_sq) - tn * mean_alone * mean_alone) / (tn - 1.0) / (h * h) : 0.0;
  rep.bound_ok = rep.estimate.p_hat >= rep.bound - rep.estimate.half_width();
  return rep;
}

}  // namespace ocs
