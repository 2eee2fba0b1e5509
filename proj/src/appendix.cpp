#include "ocshuffle/appendix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "ocshuffle/metric.hpp"
#include "ocshuffle/params.hpp"

namespace ocs {

double tv_distance(const std::vector<double>& mu, const std::vector<double>& nu) {
  if (mu.size() != nu.size()) throw InvalidArgument("measures live on different spaces");
  double s = 0.0;
  for (std::size_t w = 0; w < mu.size(); ++w) s += std::fabs(mu[w] - nu[w]);
  return 0.5 * s;
}

bool quasi_uniform_hypotheses(const std::vector<double>& mu, const std::vector<bool>& event, double D) {
  const double N = static_cast<double>(mu.size());
  double inside = 0.0;
  for (std::size_t w = 0; w < mu.size(); ++w) {
    if (mu[w] < 1.0 / (D * N)) return false;
    if (event[w]) inside += mu[w];
  }
  return inside >= 1.0 - 1.0 / (8.0 * D);
}

int quasi_uniform_count(const std::vector<double>& mu, const std::vector<bool>& event, double D) {
  const double N = static_cast<double>(mu.size());
  double inside = 0.0;
  for (std::size_t w = 0; w < mu.size(); ++w)
    if (event[w]) inside += mu[w];
  int count = 0;
  for (std::size_t w = 0; w < mu.size(); ++w)
    if (event[w] && mu[w] / inside > 1.0 / (2.0 * D * N)) ++count;
  return count;
}

GeneralQuasiCase quasi_uniform_general(const std::vector<double>& mu, const std::vector<double>& nu, double a,
                                       double b) {
  const double N = static_cast<double>(mu.size());
  int good_mu = 0, good_nu = 0;
  for (std::size_t w = 0; w < mu.size(); ++w) {
    good_mu += mu[w] >= a / N;
    good_nu += nu[w] <= b / N;
  }
  GeneralQuasiCase c;
  c.eps = 1.0 - good_mu / N;
  c.delta = 1.0 - good_nu / N;
  c.tv = tv_distance(mu, nu);
  c.bound = (1.0 - c.eps) * (1.0 - c.delta) * (a - b);
  c.holds = c.tv >= c.bound - 1e-12;
  c.corrected_bound = std::max(0.0, 1.0 - c.eps - c.delta) * (a - b);
  c.corrected_holds = c.tv >= c.corrected_bound - 1e-12;
  return c;
}

namespace {

std::string describe(const std::vector<double>& mu, const std::vector<bool>& ev, double D) {
  std::ostringstream os;
  os.precision(17);
  os << "D=" << D << " mu=[";
  for (std::size_t w = 0; w < mu.size(); ++w) os << (w ? "," : "") << mu[w];
  os << "] E={";
  bool first = true;
  for (std::size_t w = 0; w < ev.size(); ++w)
    if (ev[w]) {
      os << (first ? "" : ",") << w;
      first = false;
    }
  os << "}";
  return os.str();
}

std::vector<double> random_measure(std::mt19937_64& rng, int N) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(N);
  double s = 0.0;
  for (double& x : w) s += (x = ex(rng));
  for (double& x : w) x /= s;
  return w;
}

}  // namespace

QuasiUniformReport appendix_quasi_uniform_check(std::int64_t random_cases, std::uint64_t seed) {
  QuasiUniformReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::string general_example;
  auto fail = [&](const std::string& what) {
    if (rep.special_pass) rep.counterexample = what;
    rep.special_pass = false;
  };

  for (std::int64_t c = 0; c < random_cases; ++c) {
    const int N = size(rng);
    const double D = 1.0 + 7.0 * unit(rng);
    const double base = 1.0 / (D * N);
    std::vector<double> w = random_measure(rng, N), mu(N);
    for (int q = 0; q < N; ++q) mu[q] = base + (1.0 - N * base) * w[q];
    std::vector<bool> ev(N, true);
    std::vector<int> order(N);
    for (int q = 0; q < N; ++q) order[q] = q;
    std::shuffle(order.begin(), order.end(), rng);
    double out = 0.0;
    for (int q : order)
      if (unit(rng) < 0.5 && out + mu[q] <= 1.0 / (8.0 * D)) {
        ev[q] = false;
        out += mu[q];
      }
    if (!quasi_uniform_hypotheses(mu, ev, D)) continue;
    ++rep.special_cases;
    const int count = quasi_uniform_count(mu, ev, D);
    if (4 * count < 3 * N) fail("special: " + describe(mu, ev, D));

    std::vector<double> cond(N);
    for (int q = 0; q < N; ++q) cond[q] = ev[q] ? mu[q] / (1.0 - out) : 0.0;
    // the special statement read through the general one: a = 1/D, b = 1/(2D), nu = mu given E
    const auto via = quasi_uniform_general(mu, cond, 1.0 / D, 0.5 / D);
    const double low_fraction = 1.0 - via.delta;
    if (via.eps != 0.0 || !via.holds || 4.0 * low_fraction > 1.0 + 1e-12 ||
        std::lround(low_fraction * N) != N - count)
      fail("special via general: " + describe(mu, ev, D));

    const std::vector<double> nu = unit(rng) < 0.5 ? cond : random_measure(rng, N);
    const double a = unit(rng), b = unit(rng);
    ++rep.general_cases;
    const auto g = quasi_uniform_general(mu, nu, a, b);
    if (!g.holds || !g.corrected_holds) {
      ++rep.general_failures;
      std::ostringstream os;
      os << "general: " << describe(mu, ev, D) << " nu=[";
      for (int q = 0; q < N; ++q) os << (q ? "," : "") << nu[q];
      os << "] a=" << a << " b=" << b << " eps=" << g.eps << " delta=" << g.delta << " tv=" << g.tv
         << " bound=" << g.bound;
      if (general_example.empty()) general_example = os.str();
    }
    rep.general_pass = rep.general_pass && g.holds;
    rep.general_corrected_pass = rep.general_corrected_pass && g.corrected_holds;
  }

  // Grid: mu on multiples of 1/8, every event, D in {1, 2, 4}.
  for (int N = 1; N <= 4; ++N) {
    std::vector<int> parts(N, 0);
    std::function<void(int, int)> rec = [&](int idx, int left) {
      if (idx == N - 1) {
        parts[idx] = left;
        std::vector<double> mu(N);
        for (int q = 0; q < N; ++q) mu[q] = parts[q] / 8.0;
        for (double D : {1.0, 2.0, 4.0})
          for (int mask = 1; mask < (1 << N); ++mask) {
            std::vector<bool> ev(N);
            for (int q = 0; q < N; ++q) ev[q] = (mask >> q) & 1;
            if (!quasi_uniform_hypotheses(mu, ev, D)) continue;
            ++rep.grid_cases;
            if (4 * quasi_uniform_count(mu, ev, D) < 3 * N) fail("grid: " + describe(mu, ev, D));
          }
        return;
      }
      for (int v = 0; v <= left; ++v) {
        parts[idx] = v;
        rec(idx + 1, left - v);
      }
    };
    rec(0, 8);
  }
  if (rep.special_pass) rep.counterexample = general_example;
  return rep;
}

std::vector<double> log_binomial_upper_tails(int n, double p) {
  if (n < 0 || !(p > 0.0 && p < 1.0)) throw InvalidArgument("binomial needs n >= 0 and 0 < p < 1");
  std::vector<double> lp(n + 1);
  lp[0] = n * std::log1p(-p);
  const double odds = std::log(p) - std::log1p(-p);
  for (int x = 0; x < n; ++x) lp[x + 1] = lp[x] + std::log(static_cast<double>(n - x) / (x + 1)) + odds;
  std::vector<double> lt(n + 2, -std::numeric_limits<double>::infinity());
  for (int x = n; x >= 0; --x) {
    const double a = lt[x + 1], b = lp[x];
    const double hi = std::max(a, b), lo = std::min(a, b);
    lt[x] = std::isinf(lo) ? hi : hi + std::log1p(std::exp(lo - hi));
  }
  return lt;
}

namespace {

// pmf of the number of up-steps in t fair steps.
std::vector<double> fair_pmf(int t) {
  std::vector<double> out(t + 1);
  double lp = -t * std::log(2.0);
  for (int x = 0; x <= t; ++x) {
    out[x] = std::exp(lp);
    if (x < t) lp += std::log(static_cast<double>(t - x) / (x + 1));
  }
  return out;
}

double abs_max_tail(const std::vector<double>& up_pmf, int t, int L) {
  if (L <= 0) return 1.0;
  if (L > t) return 0.0;
  auto at = [&](std::int64_t y) {
    if (y < -t || y > t || ((y + t) & 1)) return 0.0;
    return up_pmf[static_cast<std::size_t>((y + t) / 2)];
  };
  const std::int64_t J = t / (4LL * L) + 2;
  double inside = 0.0;
  for (std::int64_t x = -(L - 1); x <= L - 1; ++x)
    for (std::int64_t j = -J; j <= J; ++j) inside += at(x + 4 * j * L) - at(2 * L - x + 4 * j * L);
  return std::max(0.0, 1.0 - inside);
}

constexpr double kAGrid[] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
constexpr double kPGrid[] = {0.1, 0.25, 0.5, 0.75, 0.9};

RwBoundsReport check_one(int n) {
  RwBoundsReport r;
  auto flag = [&](bool& which, const std::string& what) {
    if (r.first_violation.empty()) r.first_violation = what;
    which = false;
  };
  const std::vector<double> half = log_binomial_upper_tails(n, 0.5);
  const double log15 = std::log(1.0 / 15.0);
  for (int k = 0; 2 * k <= n; ++k) {
    const int x = (n + 1) / 2 + k;
    ++r.inverse_points;
    if (!(half[x] >= log15 - 16.0 * k * k / n - 1e-9))
      flag(r.inverse_ok, "inverse bound n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  for (double p : kPGrid) {
    const std::vector<double> lt = p == 0.5 ? half : log_binomial_upper_tails(n, p);
    for (int k = 0; k <= n; ++k) {
      const double x = std::ceil(n * p + k - 1e-9);
      ++r.hoeffding_points;
      if (x > n) continue;
      if (!(lt[static_cast<int>(x)] <= -2.0 * k * k / n + 1e-9))
        flag(r.hoeffding_ok, "upper bound n=" + std::to_string(n) + " p=" + std::to_string(p) + " k=" + std::to_string(k));
    }
  }
  const std::vector<double> pmf = fair_pmf(n);
  const double rt = std::sqrt(static_cast<double>(n));
  for (double a : kAGrid) {
    const double c = a * rt;
    const double x = std::ceil((n + c) / 2.0 - 1e-12);
    const double abs_tail = x > n ? 0.0 : 2.0 * std::exp(half[static_cast<int>(x)]);
    ++r.abs_points;
    if (!(abs_tail <= 2.0 * std::exp(-a * a / 2.0) + 1e-12))
      flag(r.abs_ok, "absolute bound t=" + std::to_string(n) + " a=" + std::to_string(a));
    const int L = static_cast<int>(std::floor(c)) + 1;
    ++r.max_points;
    if (!(abs_max_tail(pmf, n, L) <= 4.0 * std::exp(-a * a / 2.0) + 1e-12))
      flag(r.max_ok, "max bound t=" + std::to_string(n) + " a=" + std::to_string(a));
  }
  return r;
}

void merge(RwBoundsReport& into, const RwBoundsReport& r) {
  into.inverse_points += r.inverse_points;
  into.hoeffding_points += r.hoeffding_points;
  into.abs_points += r.abs_points;
  into.max_points += r.max_points;
  into.inverse_ok = into.inverse_ok && r.inverse_ok;
  into.hoeffding_ok = into.hoeffding_ok && r.hoeffding_ok;
  into.abs_ok = into.abs_ok && r.abs_ok;
  into.max_ok = into.max_ok && r.max_ok;
  if (into.first_violation.empty()) into.first_violation = r.first_violation;
}

}  // namespace

double walk_abs_max_tail(int t, int L) {
  if (t < 0) throw InvalidArgument("t must be nonnegative");
  return abs_max_tail(fair_pmf(t), t, L);
}

double walk_abs_max_tail_dp(int t, int L) {
  if (t < 0) throw InvalidArgument("t must be nonnegative");
  if (L <= 0) return 1.0;
  const int w = 2 * L - 1;  // positions -(L-1)..(L-1)
  std::vector<double> cur(w, 0.0), next(w);
  cur[L - 1] = 1.0;
  for (int s = 0; s < t; ++s) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int q = 0; q < w; ++q) {
      if (cur[q] == 0.0) continue;
      if (q > 0) next[q - 1] += 0.5 * cur[q];
      if (q + 1 < w) next[q + 1] += 0.5 * cur[q];
    }
    cur.swap(next);
  }
  double inside = 0.0;
  for (double v : cur) inside += v;
  return std::max(0.0, 1.0 - inside);
}

RwBoundsReport appendix_rw_bounds_check(int n_max) {
  if (n_max < 1) throw InvalidArgument("n_max must be positive");
  std::vector<RwBoundsReport> per(n_max + 1);
#pragma omp parallel for schedule(dynamic, 16)
  for (int n = 1; n <= n_max; ++n) per[n] = check_one(n);
  RwBoundsReport out;
  out.n_max = n_max;
  for (int n = 1; n <= n_max; ++n) merge(out, per[n]);
  return out;
}

RwBoundsReport appendix_rw_bounds_check_serial(int n_max) {
  if (n_max < 1) throw InvalidArgument("n_max must be positive");
  RwBoundsReport out;
  out.n_max = n_max;
  for (int n = 1; n <= n_max; ++n) merge(out, check_one(n));
  return out;
}

GoldenSweep golden_gap_sweep(int n_max) {
  if (n_max < 1) throw InvalidArgument("n_max must be positive");
  std::vector<char> ok(n_max + 1, 1);
#pragma omp parallel for schedule(dynamic, 32)
  for (int N = 1; N <= n_max; ++N) ok[N] = golden_gap_report(N).ok() ? 1 : 0;
  GoldenSweep s;
  s.n_max = n_max;
  s.checked = n_max;
  for (int N = 1; N <= n_max; ++N)
    if (!ok[N]) {
      s.pass = false;
      s.first_failure = N;
      break;
    }
  return s;
}

}  // namespace ocs
