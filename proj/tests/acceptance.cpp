// One PASS/FAIL line per acceptance criterion. Exit status 1 when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ocshuffle/appendix.hpp"
#include "ocshuffle/coupling.hpp"
#include "ocshuffle/deck.hpp"
#include "ocshuffle/exact.hpp"
#include "ocshuffle/io.hpp"
#include "ocshuffle/metric.hpp"
#include "ocshuffle/montecarlo.hpp"
#include "ocshuffle/trace.hpp"

using namespace ocs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

template <class F>
void criterion(int id, const char* name, F body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  failures += o.pass ? 0 : 1;
  std::printf("AC%-2d %s  %s  [%.1fs] %s\n", id, o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt_est(const Estimate& e) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%lld/%lld [%.3g, %.3g]", static_cast<long long>(e.successes),
                static_cast<long long>(e.trials), e.ci_lo, e.ci_hi);
  return buf;
}

std::int64_t mod(std::int64_t a, std::int64_t M) { return ((a % M) + M) % M; }

std::int64_t weight(int n, int m, int x) { return x <= m ? x : 2LL * x - m; }

// min |a| + |b| sqrt(n) over a + b m = omega mod M, by scanning b
double brute_norm(int n, int m, std::int64_t omega) {
  const std::int64_t M = 2LL * n - m + 1;
  const double rt = std::sqrt(static_cast<double>(n));
  const auto bmax = static_cast<std::int64_t>(std::ceil(M / (2.0 * rt))) + 1;
  double best = 1e300;
  for (std::int64_t b = -bmax; b <= bmax; ++b) {
    std::int64_t a = mod(omega - b * m, M);
    if (a > M / 2) a -= M;
    best = std::min(best, static_cast<double>(std::llabs(a)) + static_cast<double>(std::llabs(b)) * rt);
  }
  return best;
}

std::vector<int> cards_of(const DeckState& d) { return {d.perm.begin() + 1, d.perm.end()}; }

TrialBudget budget(std::int64_t trials, int workers = 0) {
  TrialBudget b;
  b.max_trials = trials;
  b.workers = workers;
  return b;
}

}  // namespace

int main() {
  std::printf("acceptance run, build %s\n", build_id());

  criterion(1, "movement identity on random traces", [] {
    std::mt19937_64 rng(1001);
    std::int64_t steps = 0;
    for (int rep = 0; rep < 10000; ++rep) {
      const int n = std::uniform_int_distribution<int>(10, 2000)(rng);
      const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
      const ShuffleParams p(n, m);
      const int t = std::uniform_int_distribution<int>(0, 10 * n)(rng);
      const int card = std::uniform_int_distribution<int>(1, n)(rng);
      const auto coins = uniform_coins(rng(), t);
      const auto chk = verify_movement_identity(track_card(p, card, coins, t), p);
      if (!chk.pass)
        return Outcome{false, "n=" + std::to_string(n) + " m=" + std::to_string(m) + " step " +
                                  std::to_string(chk.step)};
      steps += t;
    }
    return Outcome{true, "10000 traces, " + std::to_string(steps) + " steps"};
  });

  criterion(2, "inverse shuffle law by exact enumeration", [] {
    int cases = 0;
    for (int n : {4, 5, 6})
      for (int m = 2; m < n; ++m) {
        const ShuffleParams p(n, m);
        for (int t = 0; t <= 8; ++t) {
          std::map<std::vector<int>, int> inv, conj;  // counts out of 2^t
          for (std::uint32_t mask = 0; mask < (1U << t); ++mask) {
            std::vector<Coin> coins(t);
            for (int r = 0; r < t; ++r) coins[r] = (mask >> r) & 1U ? Coin::Tails : Coin::Heads;
            ++inv[cards_of(run_inverse(p, coins, t))];
            const DeckState d = run(p, coins, t);
            std::vector<int> c(n);
            for (int x = 1; x <= n; ++x) c[x - 1] = sigma_reorder(p, d.perm[sigma_reorder(p, x)]);
            ++conj[c];
          }
          if (inv != conj)
            return Outcome{false, "n=" + std::to_string(n) + " m=" + std::to_string(m) + " t=" + std::to_string(t)};
          ++cases;
        }
      }
    return Outcome{true, std::to_string(cases) + " (n, m, t) laws equal"};
  });

  criterion(3, "l_max bounds", [] {
    std::string worst;
    bool ok = true;
    for (int n = 64; n <= 4096; n *= 2) {
      const double q = std::pow(static_cast<double>(n), 0.75);
      for (int m : {n / 3, n / 2, 2 * n / 3}) {
        const double lm = l_max(ShuffleParams(n, m));
        if (!(0.5 * q <= lm && lm <= 2.0 * n)) {
          ok = false;
          worst += " n=" + std::to_string(n) + ",m=" + std::to_string(m);
        }
      }
      const auto g = golden_lmax_check(n);
      if (!g.pass) {
        ok = false;
        worst += " golden n=" + std::to_string(n);
      }
    }
    return Outcome{ok, ok ? "7 sizes x 4 ratios" : "violations:" + worst};
  });

  criterion(4, "single-card mixing exponents", [] {
    std::vector<std::pair<double, double>> half, gold;
    for (int n : {128, 256, 512, 1024}) {
      const auto a = t_single_mix(ShuffleParams::from_alpha(n, 0.5), 0.25);
      const auto b = t_single_mix(ShuffleParams::from_alpha(n, kGoldenPhi), 0.25);
      if (!a.t_mix || !b.t_mix) return Outcome{false, "no mixing time at n=" + std::to_string(n)};
      half.emplace_back(n, static_cast<double>(*a.t_mix));
      gold.emplace_back(n, static_cast<double>(*b.t_mix));
    }
    const double sh = fit_scaling(half).exponent, sg = fit_scaling(gold).exponent;
    char buf[96];
    std::snprintf(buf, sizeof buf, "slope %.3f at 1/2 (2.0 +- 0.3), %.3f at golden (1.5 +- 0.3)", sh, sg);
    return Outcome{std::abs(sh - 2.0) <= 0.3 && std::abs(sg - 1.5) <= 0.3, buf};
  });

  criterion(5, "tiny full-deck mixing", [] {
    std::string bad;
    int cases = 0;
    for (int n : {5, 6, 7})
      for (int m = 2; m < n; ++m) {
        const ShuffleParams p(n, m);
        const auto r = mixing_time_exact_small(p, 0.25, 1000);
        const std::string tag = " n=" + std::to_string(n) + ",m=" + std::to_string(m);
        if (!r.t_mix) bad += tag + " never below 1/4";
        const bool periodic = n % 2 == 0 && m % 2 == 0;
        for (const auto& row : r.profile) {
          if (!row.report.pinsker_ok) {
            bad += tag + " Pinsker at t=" + std::to_string(row.t);
            break;
          }
          if (periodic && row.report.tv_full < 0.5 - 1e-12) {
            bad += tag + " periodic deck reached S_n";
            break;
          }
        }
        ++cases;
      }
    return Outcome{bad.empty(), bad.empty() ? std::to_string(cases) + " decks" : bad};
  });

  criterion(6, "collision scaling over n", [] {
    std::vector<std::pair<double, Estimate>> pts;
    std::string detail;
    for (int n : {200, 400, 800, 1600, 3200}) {
      const auto e = estimate_l1_collision(ShuffleParams::from_alpha(n, 0.5), {}, budget(1000000), 600 + n);
      pts.emplace_back(n, e);
      detail += " n=" + std::to_string(n) + ":" + std::to_string(e.successes);
    }
    const auto fit = fit_scaling_weighted(pts);
    const ShuffleParams p(400, 200);
    L1Config l1c;
    l1c.control = true;
    SqrtnConfig sqc;
    sqc.control = true;
    FullCollideConfig fcc;
    fcc.ell = 40.0;
    fcc.control = true;
    TargetingConfig tgc;
    tgc.ell = 64.0;
    tgc.control = true;
    std::int64_t control_hits = estimate_l1_collision(p, l1c, budget(100000), 1).successes +
                                estimate_match_prob(p, 398, 399, budget(100000), 1, true).successes +
                                estimate_sqrtn_collide(p, sqc, budget(100000), 1).successes +
                                estimate_full_collide(p, fcc, ConstantProfile::desk(), budget(100000), 1).successes;
    for (const auto& e : estimate_targeting(ShuffleParams(4096, 2048), tgc, ConstantProfile::desk(), budget(10000), 1))
      control_hits += e.successes;
    char buf[128];
    std::snprintf(buf, sizeof buf, "exponent %.3f +- %.3f in [-0.7, -0.3]; control hits %lld;", fit.exponent,
                  fit.stderr_, static_cast<long long>(control_hits));
    return Outcome{fit.exponent >= -0.7 && fit.exponent <= -0.3 && control_hits == 0, buf + detail};
  });

  criterion(7, "full pipeline scaling (desk profile)", [] {
    const int n = 256;
    const auto desk = ConstantProfile::desk();
    const std::int64_t trials = 2000000;
    std::vector<std::pair<double, Estimate>> pts;
    std::string detail;
    Estimate half_top;
    for (double ell : {16.0, 23.0, 32.0, 45.0, 64.0}) {
      FullCollideConfig c;
      c.ell = ell;
      const auto e = estimate_full_collide(ShuffleParams(n, n / 2), c, desk, budget(trials), 700 + static_cast<int>(ell));
      pts.emplace_back(ell, e);
      detail += " l=" + std::to_string(static_cast<int>(ell)) + ":" + std::to_string(e.successes);
      half_top = e;
    }
    const auto fit = fit_scaling_weighted(pts);
    FullCollideConfig c;
    c.ell = 64.0;
    const ShuffleParams golden(n, static_cast<int>(std::floor(kGoldenPhi * n)));
    const auto g = estimate_full_collide(golden, c, desk, budget(trials), 801);
    const bool boost = half_top.ci_lo > g.ci_hi;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "n=%d: ell exponent %.2f +- %.2f (want [-5, -3]); gamma %d vs %d at ell=64: m=%d %s vs m=%d %s%s;", n,
                  fit.exponent, fit.stderr_, gamma(ShuffleParams(n, n / 2), 64.0), gamma(golden, 64.0), n / 2,
                  fmt_est(half_top).c_str(), golden.m(), fmt_est(g).c_str(), boost ? "" : " (CIs overlap)");
    return Outcome{fit.exponent >= -5.0 && fit.exponent <= -3.0 && boost, buf + detail};
  });

  criterion(8, "worked coupling example", [] {
    for (auto [n, m] : {std::pair{200, 80}, std::pair{500, 250}, std::pair{130, 4}})
      if (!replay_worked_example(ShuffleParams(n, m)).matches)
        return Outcome{false, "mismatch at n=" + std::to_string(n) + " m=" + std::to_string(m)};
    return Outcome{true, "5 steps reproduced at 3 (n, m)"};
  });

  criterion(9, "lattice counting, spread triples and time selectors", [] {
    std::mt19937_64 rng(909);
    for (int rep = 0; rep < 100; ++rep) {
      const int n = std::uniform_int_distribution<int>(16, 600)(rng);
      const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
      const ShuffleParams p(n, m);
      const std::int64_t M = p.modulus();
      const double rt = std::sqrt(static_cast<double>(n));
      const double ell = std::uniform_real_distribution<double>(rt, std::max(rt, l_max(p)))(rng);
      int g = 0;
      for (std::int64_t k = 0; k < ell / rt; ++k) {
        const std::int64_t r = mod(k * m, M);
        g += static_cast<double>(std::min(r, M - r)) < ell;
      }
      const auto bmax = static_cast<std::int64_t>(std::floor(ell / rt));
      const auto amax = static_cast<std::int64_t>(std::floor(ell));
      std::vector<bool> hit(M, false);
      for (std::int64_t b = -bmax; b <= bmax; ++b)
        for (std::int64_t a = -amax; a <= amax; ++a) hit[mod(a + b * m, M)] = true;
      int size = 0;
      for (int x = 1; x <= n; ++x) size += hit[mod(weight(n, m, x), M)];
      if (g != gamma(p, ell) || !(size >= ell * ell / (2.0 * g * rt)))
        return Outcome{false, "overcount at n=" + std::to_string(n) + " m=" + std::to_string(m)};
      const auto tri = spread_triple(p, ell);
      if (tri) {
        const auto& f = tri->positions;
        for (int q = 0; q < 3; ++q)
          if (!(brute_norm(n, m, weight(n, m, f[q])) < ell)) return Outcome{false, "spread triple norm"};
        for (int a = 0; a < 3; ++a)
          for (int b = a + 1; b < 3; ++b)
            if (f[a] == f[b] || !(brute_norm(n, m, weight(n, m, f[a]) - weight(n, m, f[b])) > ell / 5.0))
              return Outcome{false, "spread triple separation"};
      }
    }
    for (int rep = 0; rep < 1000; ++rep) {
      const int n = std::uniform_int_distribution<int>(3, 5000)(rng);
      const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
      const ShuffleParams p(n, m);
      const std::int64_t M = p.modulus(), s = std::uniform_int_distribution<std::int64_t>(0, 1000000)(rng);
      const std::int64_t t1 = select_time_T1(p, s), t2 = select_time_T2(p, s);
      const bool ok1 = t1 >= s && t1 <= s + 4LL * n && mod(t1 - (t1 / (2LL * n)) * (m - 1), M) == 0;
      const bool ok2 = t2 >= s && t2 <= s + 4LL * n && mod(t2 - (t2 / (2LL * n)) * m, M) == 0;
      if (!ok1 || !ok2) return Outcome{false, "time selector at n=" + std::to_string(n) + " s=" + std::to_string(s)};
    }
    return Outcome{true, "100 overcount and spread cases, 1000 selector cases"};
  });

  criterion(10, "appendix suite", [] {
    const auto q = appendix_quasi_uniform_check(100000, 1010);
    const auto r = appendix_rw_bounds_check(10000);
    const auto g = golden_gap_sweep(10000);
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "quasi-uniform special %s (%lld cases + %lld grid); general product form %s (%lld of %lld fail; "
                  "1-eps-delta form %s); random walk %s; golden gaps %s up to %d",
                  q.special_pass ? "pass" : "FAIL", static_cast<long long>(q.special_cases),
                  static_cast<long long>(q.grid_cases), q.general_pass ? "pass" : "FAIL",
                  static_cast<long long>(q.general_failures), static_cast<long long>(q.general_cases),
                  q.general_corrected_pass ? "pass" : "FAIL", r.pass() ? "pass" : "FAIL", g.pass ? "pass" : "FAIL",
                  g.n_max);
    return Outcome{q.pass() && r.pass() && g.pass, buf};
  });

  criterion(11, "determinism across worker counts", [] {
    auto body = [](int workers) {
      json out = json::array();
      const ShuffleParams p(400, 200);
      out.push_back(estimate_json(estimate_l1_collision(p, {}, budget(200000, workers), 11)));
      out.push_back(estimate_json(estimate_sqrtn_collide(ShuffleParams(60, 30), {}, budget(100000, workers), 12)));
      FullCollideConfig fc;
      fc.ell = 40.0;
      out.push_back(estimate_json(estimate_full_collide(p, fc, ConstantProfile::desk(), budget(20000, workers), 13)));
      SpreadConfig sc;
      sc.ell = 30.0;
      sc.cards = sc.targets = spread_triple(p, 30.0)->positions;
      out.push_back(estimate_json(spread_experiment(p, sc, budget(20000, workers), 14)));
      TrialBudget staged = budget(100000, workers);
      staged.batch = 7777;
      staged.target_half_width = 1e-4;
      out.push_back(estimate_json(estimate_l1_collision(p, {}, staged, 15)));
      const auto rw = appendix_rw_bounds_check(300);
      out.push_back({rw.inverse_points, rw.max_points, rw.first_violation});
      return out.dump();
    };
    const std::string a = body(1), b = body(8), c = body(1);
    return Outcome{a == b && a == c, a == b && a == c ? "6 result bodies identical for workers 1, 8, 1"
                                                      : "result bodies differ"};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures ? 1 : 0;
}
