#include "ocshuffle/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ocs {

std::int64_t position_weight(const ShuffleParams& p, int x) {
  if (x < 1 || x > p.n())
    throw InvalidArgument("position " + std::to_string(x) + " outside 1.." + std::to_string(p.n()));
  return x <= p.m() ? x : 2 * static_cast<std::int64_t>(x) - p.m();
}

std::int64_t reduce_mod(std::int64_t omega, std::int64_t modulus) {
  std::int64_t r = omega % modulus;
  return r < 0 ? r + modulus : r;
}

std::int64_t m_distance(const ShuffleParams& p, std::int64_t omega) {
  std::int64_t M = p.modulus();
  std::int64_t r = reduce_mod(omega, M);
  return std::min(r, M - r);
}

namespace {

std::int64_t b_limit(const ShuffleParams& p) {
  return static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(p.n()))));
}

// smallest-|a| representative, positive on the tie at M/2
std::int64_t signed_rep(std::int64_t r, std::int64_t M) { return 2 * r <= M ? r : r - M; }

}  // namespace

NormDecomposition norm(const ShuffleParams& p, std::int64_t omega) {
  const std::int64_t M = p.modulus();
  const double rt = std::sqrt(static_cast<double>(p.n()));
  const std::int64_t B = b_limit(p);
  NormDecomposition best;
  best.a = signed_rep(reduce_mod(omega, M), M);
  best.b = 0;
  best.value = static_cast<double>(std::llabs(best.a));
  for (std::int64_t d = 1; d <= B; ++d) {
    for (std::int64_t b : {-d, d}) {
      std::int64_t a = signed_rep(reduce_mod(omega - b * p.m(), M), M);
      double v = static_cast<double>(std::llabs(a)) + static_cast<double>(d) * rt;
      if (v < best.value - kNormTieTolerance) best = {a, b, v};
    }
  }
  return best;
}

std::vector<double> norm_table(const ShuffleParams& p) {
  const std::int64_t M = p.modulus();
  const double rt = std::sqrt(static_cast<double>(p.n()));
  const std::int64_t B = b_limit(p);
  std::vector<double> best(M);
  for (std::int64_t w = 0; w < M; ++w) best[w] = static_cast<double>(std::min(w, M - w));
  for (std::int64_t b = -B; b <= B; ++b) {
    if (b == 0) continue;
    const double cost = static_cast<double>(std::llabs(b)) * rt;
    const std::int64_t shift = reduce_mod(-b * p.m(), M);
    for (std::int64_t w = 0; w < M; ++w) {
      std::int64_t r = w + shift;
      if (r >= M) r -= M;
      double v = static_cast<double>(std::min(r, M - r)) + cost;
      if (v < best[w]) best[w] = v;
    }
  }
  return best;
}

double l_max(const ShuffleParams& p, const std::vector<double>& table) {
  double best = 0.0;
  for (std::int64_t w = 1; w < p.modulus(); ++w) best = std::max(best, table[w]);
  return best;
}

double l_max(const ShuffleParams& p) { return l_max(p, norm_table(p)); }

int gamma(const ShuffleParams& p, double ell) {
  if (!(ell > 0.0)) throw InvalidArgument("ell must be positive");
  const double rt = std::sqrt(static_cast<double>(p.n()));
  int count = 0;
  for (std::int64_t k = 0; static_cast<double>(k) < ell / rt; ++k)
    if (static_cast<double>(m_distance(p, k * p.m())) < ell) ++count;
  return count;
}

std::vector<int> enumerate_N_ell(const ShuffleParams& p, double ell) {
  if (!(ell > 0.0)) throw InvalidArgument("ell must be positive");
  const auto bmax = static_cast<std::int64_t>(std::floor(ell / std::sqrt(static_cast<double>(p.n()))));
  std::vector<int> out;
  for (int x = 1; x <= p.n(); ++x) {
    const std::int64_t w = position_weight(p, x);
    for (std::int64_t b = -bmax; b <= bmax; ++b) {
      if (static_cast<double>(m_distance(p, w - b * p.m())) <= ell) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

namespace {

// position whose weight is congruent to w, if any
std::optional<int> position_with_weight(const ShuffleParams& p, std::int64_t w) {
  w = reduce_mod(w, p.modulus());
  if (w == 0) return std::nullopt;
  if (w <= p.m()) return static_cast<int>(w);
  if ((w - p.m()) % 2 != 0) return std::nullopt;
  return static_cast<int>((w + p.m()) / 2);
}

std::int64_t ceil_half(std::int64_t v) { return v >= 0 ? (v + 1) / 2 : -((-v) / 2); }

double norm_of(const ShuffleParams& p, const std::vector<double>& table, std::int64_t w) {
  return table[reduce_mod(w, p.modulus())];
}

bool valid_with_table(const ShuffleParams& p, const std::vector<double>& table, double ell,
                      const std::array<int, 3>& f) {
  if (f[0] == f[1] || f[0] == f[2] || f[1] == f[2]) return false;
  std::array<std::int64_t, 3> w{};
  for (int q = 0; q < 3; ++q) {
    if (f[q] < 1 || f[q] > p.n()) return false;
    w[q] = position_weight(p, f[q]);
    if (!(norm_of(p, table, w[q]) < ell)) return false;
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      if (!(norm_of(p, table, w[a] - w[b]) > ell / 5.0)) return false;
  return true;
}

}  // namespace

bool spread_triple_valid(const ShuffleParams& p, double ell, const std::array<int, 3>& f) {
  return valid_with_table(p, norm_table(p), ell, f);
}

std::optional<SpreadTriple> spread_triple(const ShuffleParams& p, double ell, SpreadMode mode) {
  if (!(ell > 0.0)) throw InvalidArgument("ell must be positive");
  const auto table = norm_table(p);
  const double lmax = l_max(p, table);
  if (mode == SpreadMode::Strict) {
    double lo = 100.0 * std::sqrt(static_cast<double>(p.n()));
    if (!(lo < ell && ell < lmax))
      throw InvalidArgument("strict spread triple needs 100 sqrt(n) < ell < l_max");
  }

  // halving construction from a norm-maximising z
  std::int64_t z = 1;
  for (std::int64_t w = 1; w < p.modulus(); ++w)
    if (table[w] > table[z]) z = w;
  const NormDecomposition dz = norm(p, z);
  std::int64_t a = dz.a, b = dz.b;
  for (int x = 0; x < 64 && (a != 0 || b != 0); ++x) {
    const std::int64_t a2 = ceil_half(a), b2 = ceil_half(b);
    const std::int64_t wk = a + b * p.m();
    const std::int64_t wj = a2 + b2 * p.m();
    for (int dj = -1; dj <= 1; ++dj) {
      auto fj = position_with_weight(p, wj + dj);
      if (!fj) continue;
      for (int dk = -1; dk <= 1; ++dk) {
        auto fk = position_with_weight(p, wk + dk);
        if (!fk) continue;
        std::array<int, 3> f{1, *fj, *fk};
        if (valid_with_table(p, table, ell, f)) return SpreadTriple{f, true, x};
      }
    }
    a = a2;
    b = b2;
  }

  // exhaustive fallback, f_i = 1 first
  std::vector<int> near;
  for (int x = 1; x <= p.n(); ++x)
    if (table[reduce_mod(position_weight(p, x), p.modulus())] < ell) near.push_back(x);
  for (int fj : near)
    for (int fk : near) {
      std::array<int, 3> f{1, fj, fk};
      if (valid_with_table(p, table, ell, f)) return SpreadTriple{f, false, 0};
    }
  if (p.n() <= 200) {
    for (int fi : near)
      for (int fj : near)
        for (int fk : near) {
          std::array<int, 3> f{fi, fj, fk};
          if (valid_with_table(p, table, ell, f)) return SpreadTriple{f, false, 0};
        }
  }
  return std::nullopt;
}

namespace {

template <class F>
std::int64_t scan_window(const ShuffleParams& p, std::int64_t s, F congruence) {
  if (s < 0) throw InvalidArgument("s must be nonnegative");
  const std::int64_t M = p.modulus();
  const std::int64_t two_n = 2 * static_cast<std::int64_t>(p.n());
  for (std::int64_t t = s; t <= s + 2 * two_n; ++t)
    if (reduce_mod(congruence(t, t / two_n), M) == 0) return t;
  throw std::logic_error("time selector window exhausted; invariant violated");
}

}  // namespace

std::int64_t select_time_T1(const ShuffleParams& p, std::int64_t s) {
  return scan_window(p, s, [&](std::int64_t t, std::int64_t laps) { return -t + laps * (p.m() - 1); });
}

std::int64_t select_time_T2(const ShuffleParams& p, std::int64_t s) {
  return scan_window(p, s, [&](std::int64_t t, std::int64_t laps) { return t - laps * p.m(); });
}

int sigma_reorder(const ShuffleParams& p, int x) {
  if (x < 1 || x > p.n())
    throw InvalidArgument("position " + std::to_string(x) + " outside 1.." + std::to_string(p.n()));
  return x <= p.m() ? p.m() + 1 - x : p.n() + p.m() + 1 - x;
}

MonteOrdering monte_ordering(const ShuffleParams& p) {
  const int n = p.n();
  const double rt = std::sqrt(static_cast<double>(n));
  const int root = static_cast<int>(std::floor(rt));
  const auto table = norm_table(p);
  const double lmax = l_max(p, table);

  MonteOrdering out;
  out.nu.assign(n + 1, 0);
  out.a = std::max(1, static_cast<int>(std::ceil(std::log2(lmax) - 0.5 * std::log2(static_cast<double>(n)))));
  auto card_norm = [&](int x) { return table[reduce_mod(position_weight(p, x), p.modulus())]; };
  // guard against rounding in the log expression
  while (std::ldexp(rt, out.a) < lmax) ++out.a;

  int rank = 0;
  std::vector<char> placed(n + 1, 0);
  auto place = [&](int x) {
    out.nu[x] = ++rank;
    placed[x] = 1;
  };
  out.leading = {n, n - 1};
  for (int x : out.leading) place(x);

  std::vector<int> block0;
  for (int x = n - 2; x >= n - root && x >= 1; --x) block0.push_back(x);
  for (int x : block0) place(x);
  out.blocks.push_back(block0);
  out.thresholds.push_back(0.0);
  out.J_sizes.push_back(static_cast<int>(block0.size()));

  for (int k = 1; k <= out.a; ++k) {
    const double lk = std::ldexp(rt, k);
    out.thresholds.push_back(lk);
    std::vector<int> block;
    int jsize = 0;
    for (int x = n; x >= 1; --x) {
      if (card_norm(x) > lk) continue;
      ++jsize;
      if (!placed[x]) block.push_back(x);
    }
    for (int x : block) place(x);
    out.blocks.push_back(block);
    out.J_sizes.push_back(jsize);
  }
  if (rank != n) throw std::logic_error("monte ordering blocks do not cover the deck");
  return out;
}

GoldenGapReport golden_gap_report(int N) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  const long double phi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  std::vector<long double> pts(N + 1);
  for (int k = 0; k <= N; ++k) {
    long double v = static_cast<long double>(k) * phi;
    pts[k] = v - std::floor(v);
  }
  std::sort(pts.begin(), pts.end());
  GoldenGapReport r;
  r.N = N;
  for (int k = 0; k < N; ++k) r.gaps.push_back(static_cast<double>(pts[k + 1] - pts[k]));
  r.gaps.push_back(static_cast<double>(1.0L - pts[N] + pts[0]));
  std::sort(r.gaps.begin(), r.gaps.end(), std::greater<>());

  for (double g : r.gaps)
    if (r.distinct_gaps.empty() || r.distinct_gaps.back() - g > kNormTieTolerance)
      r.distinct_gaps.push_back(g);
  r.three_distance_ok = r.distinct_gaps.size() <= 3;

  bool powers = true;
  for (double g : r.distinct_gaps) {
    int z = static_cast<int>(std::lround(std::log(g) / std::log(static_cast<double>(phi))));
    r.exponents.push_back(z);
    if (std::fabs(std::pow(static_cast<double>(phi), z) - g) > kNormTieTolerance) powers = false;
  }
  if (!r.exponents.empty()) {
    auto [lo, hi] = std::minmax_element(r.exponents.begin(), r.exponents.end());
    if (*hi - *lo > 2) powers = false;
  }
  r.consecutive_powers_ok = powers;

  r.max_covering_distance = r.gaps.front() / 2.0;
  r.covering_bound = 1.0 / (2.0 * kGoldenPhi * kGoldenPhi * (N + 1));
  r.covering_ok = r.max_covering_distance <= r.covering_bound + kNormTieTolerance;
  return r;
}

GoldenLmaxCheck golden_lmax_check(int n) {
  const int m = static_cast<int>(std::floor(kGoldenPhi * n));
  ShuffleParams p(n, m);
  GoldenLmaxCheck c;
  c.n = n;
  c.m = m;
  c.l_max = l_max(p);
  c.bound = 6.0 * std::pow(static_cast<double>(n), 0.75);
  c.lower_bound = 0.5 * std::pow(static_cast<double>(n), 0.75);
  c.pass = c.l_max <= c.bound;
  c.lower_pass = c.l_max >= c.lower_bound;
  return c;
}

}  // namespace ocs
