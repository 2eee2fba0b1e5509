#include "ocshuffle/exact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include "ocshuffle/coins.hpp"

namespace ocs {

namespace {

struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

constexpr int kParallelPositions = 4096;
constexpr std::uint64_t kParallelRanks = 720;

}  // namespace

double DistVector::total() const {
  Kahan k;
  for (double v : prob) k.add(v);
  return k.sum;
}

bool DistVector::valid(double tol) const {
  for (double v : prob)
    if (v < -1e-15) return false;
  return std::fabs(total() - 1.0) <= tol;
}

DistVector DistVector::point_position(int n, int pos) {
  if (pos < 1 || pos > n) throw InvalidArgument("start position out of range");
  DistVector d{Support::Positions, n, std::vector<double>(n, 0.0)};
  d.prob[pos - 1] = 1.0;
  return d;
}

DistVector DistVector::uniform_positions(int n) {
  return DistVector{Support::Positions, n, std::vector<double>(n, 1.0 / n)};
}

std::vector<std::pair<int, double>> SingleCardKernel::row(int from) const {
  if (from < 1 || from > n_) throw InvalidArgument("row out of range");
  if (from < m_) return {{from + 1, 1.0}};
  if (from == m_) return {{1, 0.5}, {m_ + 1, 0.5}};
  if (from < n_) return {{from, 0.5}, {from + 1, 0.5}};
  return {{n_, 0.5}, {1, 0.5}};
}

void SingleCardKernel::apply(const std::vector<double>& in, std::vector<double>& out) const {
  const int n = n_, m = m_;
  out.resize(n);
  // index y-1 holds position y
#pragma omp parallel for schedule(static) if (n >= kParallelPositions)
  for (int y = 1; y <= n; ++y) {
    double v;
    if (y == 1)
      v = 0.5 * (in[m - 1] + in[n - 1]);
    else if (y <= m)
      v = in[y - 2];
    else
      v = 0.5 * (in[y - 1] + in[y - 2]);
    out[y - 1] = v;
  }
}

void SingleCardKernel::apply_serial(const std::vector<double>& in, std::vector<double>& out) const {
  out.assign(n_, 0.0);
  for (int x = 1; x <= n_; ++x)
    for (auto [to, w] : row(x)) out[to - 1] += w * in[x - 1];
}

std::vector<double> SingleCardKernel::dense_row_major() const {
  std::vector<double> a(static_cast<std::size_t>(n_) * n_, 0.0);
  for (int x = 1; x <= n_; ++x)
    for (auto [to, w] : row(x)) a[static_cast<std::size_t>(x - 1) * n_ + (to - 1)] += w;
  return a;
}

std::string SingleCardKernel::coordinate_text() const {
  std::ostringstream os;
  std::size_t nnz = 0;
  for (int x = 1; x <= n_; ++x) nnz += row(x).size();
  os << "%%MatrixMarket matrix coordinate real general\n" << n_ << ' ' << n_ << ' ' << nnz << '\n';
  for (int x = 1; x <= n_; ++x)
    for (auto [to, w] : row(x)) os << x << ' ' << to << ' ' << w << '\n';
  return os.str();
}

double tv_to_uniform(const std::vector<double>& dist) {
  const double u = 1.0 / static_cast<double>(dist.size());
  Kahan k;
  for (double v : dist) k.add(std::fabs(v - u));
  return 0.5 * k.sum;
}

std::vector<double> tv_profile(const SingleCardKernel& k, const DistVector& start, std::int64_t horizon) {
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
  if (start.support != Support::Positions || start.n != k.n()) throw InvalidArgument("start must live on positions 1..n");
  std::vector<double> cur = start.prob, next;
  std::vector<double> out;
  out.reserve(horizon + 1);
  out.push_back(tv_to_uniform(cur));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    k.apply(cur, next);
    cur.swap(next);
    out.push_back(tv_to_uniform(cur));
  }
  return out;
}

SingleMix t_single_mix(const ShuffleParams& p, double delta, int start_pos, std::int64_t max_steps) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  SingleCardKernel k(p);
  std::vector<double> cur = DistVector::point_position(p.n(), start_pos).prob, next;
  SingleMix r;
  r.last_tv = tv_to_uniform(cur);
  for (std::int64_t t = 0;; ++t) {
    if (r.last_tv <= delta) {
      r.t_mix = t;
      r.steps = t;
      return r;
    }
    if (t == max_steps) {
      r.steps = t;
      return r;
    }
    k.apply(cur, next);
    cur.swap(next);
    r.last_tv = tv_to_uniform(cur);
  }
}

RelaxationReport relaxation_dense(const ShuffleParams& p) {
  const int n = p.n();
  if (n > 512) throw InvalidArgument("dense eigensolve is capped at n = 512");
  SingleCardKernel k(p);
  auto a = k.dense_row_major();
  Eigen::MatrixXd mat(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) mat(r, c) = a[static_cast<std::size_t>(r) * n + c];
  Eigen::EigenSolver<Eigen::MatrixXd> es(mat, false);
  const auto& ev = es.eigenvalues();
  int one = 0;
  for (int r = 1; r < n; ++r)
    if (std::abs(ev[r] - 1.0) < std::abs(ev[one] - 1.0)) one = r;
  double lam = 0.0;
  for (int r = 0; r < n; ++r)
    if (r != one) lam = std::max(lam, std::abs(ev[r]));
  RelaxationReport rep;
  rep.method = "dense";
  rep.lambda2 = lam;
  rep.gap = 1.0 - lam;
  rep.relaxation_time = 1.0 / rep.gap;
  rep.residual = std::abs(ev[one] - 1.0);
  return rep;
}

RelaxationReport relaxation_power(const ShuffleParams& p, std::int64_t iterations, double tol) {
  const int n = p.n();
  constexpr int kBlock = 50;
  if (iterations < 8 * kBlock) throw InvalidArgument("power iteration needs at least 400 iterations");
  SingleCardKernel k(p);
  std::vector<double> v(n), w;
  for (int x = 0; x < n; ++x) v[x] = static_cast<double>(mix64(static_cast<std::uint64_t>(x) + 17) >> 11) * 0x1.0p-53 - 0.5;
  auto project = [&] {
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double s = 0.0;
    for (double& x : v) {
      x -= mean;
      s += x * x;
    }
    s = std::sqrt(s);
    for (double& x : v) x /= s;
  };
  project();
  const std::int64_t blocks = iterations / kBlock;
  std::vector<double> logs;
  logs.reserve(blocks);
  for (std::int64_t b = 0; b < blocks; ++b) {
    for (int s = 0; s < kBlock; ++s) {
      k.apply(v, w);
      v.swap(w);
    }
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double s2 = 0.0;
    for (double& x : v) {
      x -= mean;
      s2 += x * x;
    }
    const double r = std::sqrt(s2);
    logs.push_back(std::log(r));
    for (double& x : v) x /= r;
  }
  auto rate = [&](std::int64_t from, std::int64_t to) {
    double s = 0.0;
    for (std::int64_t b = from; b < to; ++b) s += logs[b];
    return std::exp(s / static_cast<double>((to - from) * kBlock));
  };
  const double lam = rate(blocks / 2, blocks);
  const double early = rate(blocks / 2, 3 * blocks / 4);
  const double late = rate(3 * blocks / 4, blocks);
  RelaxationReport rep;
  rep.method = "power";
  rep.lambda2 = lam;
  rep.gap = 1.0 - lam;
  rep.relaxation_time = 1.0 / rep.gap;
  rep.iterations = blocks * kBlock;
  rep.residual = std::fabs((1.0 - early) - (1.0 - late)) / std::max(rep.gap, 1e-300);
  rep.converged = rep.residual <= tol;
  return rep;
}

RelaxationReport relaxation_estimate(const ShuffleParams& p) {
  return p.n() <= 512 ? relaxation_dense(p) : relaxation_power(p);
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int r = 2; r <= n; ++r) f *= static_cast<std::uint64_t>(r);
  return f;
}

std::uint64_t lehmer_rank(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  std::uint64_t rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j) smaller += perm[j] < perm[i];
    rank = rank * static_cast<std::uint64_t>(n - i) + static_cast<std::uint64_t>(smaller);
  }
  return rank;
}

std::vector<int> lehmer_unrank(std::uint64_t rank, int n) {
  std::vector<int> digits(n);
  for (int i = n - 1; i >= 0; --i) {
    const auto base = static_cast<std::uint64_t>(n - i);
    digits[i] = static_cast<int>(rank % base);
    rank /= base;
  }
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 1);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) {
    perm[i] = pool[digits[i]];
    pool.erase(pool.begin() + digits[i]);
  }
  return perm;
}

int perm_sign(const std::vector<int>& perm) {
  int inv = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j) inv += perm[j] < perm[i];
  return (inv & 1) ? -1 : 1;
}

namespace {

void check_full_deck(const ShuffleParams& p) {
  if (p.n() > kFullDeckCap) throw InvalidArgument("full-deck computation is capped at n = 8");
}

}  // namespace

void full_deck_step(const ShuffleParams& p, const std::vector<double>& in, std::vector<double>& out) {
  const int n = p.n(), m = p.m();
  const auto size = static_cast<std::int64_t>(factorial(n));
  out.resize(size);
#pragma omp parallel for schedule(static) if (size >= static_cast<std::int64_t>(kParallelRanks))
  for (std::int64_t r = 0; r < size; ++r) {
    std::vector<int> cur = lehmer_unrank(static_cast<std::uint64_t>(r), n);
    std::vector<int> pre = cur;
    std::rotate(pre.begin(), pre.begin() + 1, pre.begin() + m);
    const double heads = in[lehmer_rank(pre)];
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    const double tails = in[lehmer_rank(cur)];
    out[r] = 0.5 * (heads + tails);
  }
}

void full_deck_step_serial(const ShuffleParams& p, const std::vector<double>& in, std::vector<double>& out) {
  const int n = p.n(), m = p.m();
  const std::uint64_t size = factorial(n);
  out.assign(size, 0.0);
  for (std::uint64_t r = 0; r < size; ++r) {
    if (in[r] == 0.0) continue;
    std::vector<int> cur = lehmer_unrank(r, n);
    std::vector<int> h = cur;
    std::rotate(h.begin(), h.begin() + (m - 1), h.begin() + m);
    out[lehmer_rank(h)] += 0.5 * in[r];
    std::rotate(cur.begin(), cur.end() - 1, cur.end());
    out[lehmer_rank(cur)] += 0.5 * in[r];
  }
}

DistVector full_deck_dist(const ShuffleParams& p, std::int64_t t) {
  check_full_deck(p);
  if (t < 0) throw InvalidArgument("t must be nonnegative");
  DistVector d{Support::Permutations, p.n(), std::vector<double>(factorial(p.n()), 0.0)};
  d.prob[0] = 1.0;
  std::vector<double> next;
  for (std::int64_t s = 0; s < t; ++s) {
    full_deck_step(p, d.prob, next);
    d.prob.swap(next);
  }
  return d;
}

const char* to_string(CosetTarget c) {
  switch (c) {
    case CosetTarget::All: return "S_n";
    case CosetTarget::Even: return "A_n";
    case CosetTarget::Odd: return "S_n\\A_n";
  }
  return "?";
}

CosetTarget coset_target(const ShuffleParams& p, std::int64_t t) {
  switch (p.parity()) {
    case ParityClass::Alternating: return CosetTarget::Even;
    case ParityClass::Periodic: return (t % 2 == 0) ? CosetTarget::Even : CosetTarget::Odd;
    case ParityClass::Full: return CosetTarget::All;
  }
  return CosetTarget::All;
}

namespace {

// x log x - x + 1, accurate near x = 1
double relative_entropy_term(double x) {
  if (x <= 0.0) return 1.0;
  const double d = x - 1.0;
  if (std::fabs(d) < 0.01) {
    double s = 0.0, pw = d;
    for (int k = 2; k <= 9; ++k) {
      pw *= d;
      s += (k % 2 ? -pw : pw) / (k * (k - 1.0));
    }
    return s;
  }
  return x * std::log(x) - d;
}

}  // namespace

EntropyReport entropy_report(const DistVector& dist, CosetTarget target) {
  if (dist.support != Support::Permutations) throw InvalidArgument("entropy report needs a distribution over S_n");
  const int n = dist.n;
  const std::uint64_t size = dist.prob.size();
  if (size != factorial(n)) throw InvalidArgument("distribution size does not match n!");
  const double full = static_cast<double>(size);
  const double universe = target == CosetTarget::All ? full : full / 2.0;

  std::vector<int> signs(size);
  double sign_mass[2] = {0.0, 0.0};  // even, odd
  {
    Kahan ev, od;
    for (std::uint64_t r = 0; r < size; ++r) {
      signs[r] = perm_sign(lehmer_unrank(r, n));
      (signs[r] > 0 ? ev : od).add(dist.prob[r]);
    }
    sign_mass[0] = ev.sum;
    sign_mass[1] = od.sum;
  }

  Kahan ent, cond, tv, tv_full;
  bool off_target = false;
  for (std::uint64_t r = 0; r < size; ++r) {
    const double q = dist.prob[r];
    const bool in = target == CosetTarget::All || (target == CosetTarget::Even) == (signs[r] > 0);
    tv.add(std::fabs(q - (in ? 1.0 / universe : 0.0)));
    tv_full.add(std::fabs(q - 1.0 / full));
    // sum q log(Uq) = sum (1/U) h(Uq) over the target, each term nonnegative
    if (in) ent.add(relative_entropy_term(universe * q) / universe);
    if (q <= 0.0) continue;
    if (!in) off_target = true;
    const double ps = sign_mass[signs[r] > 0 ? 0 : 1];
    cond.add(q * std::log(q * (full / 2.0) / ps));
  }
  EntropyReport rep;
  rep.target = target;
  rep.ent = off_target ? std::numeric_limits<double>::infinity() : ent.sum;
  rep.ent_given_sign = cond.sum;
  rep.tv = 0.5 * tv.sum;
  rep.tv_full = 0.5 * tv_full.sum;
  rep.pinsker_ok = rep.tv <= std::sqrt(std::max(rep.ent, 0.0) / 2.0) + 1e-12;
  return rep;
}

EntropyReport entropy_report(const DistVector& dist, const ShuffleParams& p, std::int64_t t) {
  return entropy_report(dist, coset_target(p, t));
}

ExactMix mixing_time_exact_small(const ShuffleParams& p, double delta, std::int64_t horizon, bool allow_large,
                                 bool stop_at_mix) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (p.n() > kFullDeckDefaultCap && !allow_large)
    throw InvalidArgument("n = 8 needs the allow-large flag");
  check_full_deck(p);
  DistVector d = full_deck_dist(p, 0);
  std::vector<double> next;
  ExactMix out;
  for (std::int64_t t = 0; t <= horizon; ++t) {
    if (t > 0) {
      full_deck_step(p, d.prob, next);
      d.prob.swap(next);
    }
    ExactProfileRow row{t, entropy_report(d, p, t)};
    out.last_tv = row.report.tv;
    out.profile.push_back(row);
    if (!out.t_mix && row.report.tv <= delta) {
      out.t_mix = t;
      if (stop_at_mix) break;
    }
  }
  return out;
}

std::string exact_profile_csv(const std::vector<ExactProfileRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "t,tv,ent,ent_given_sign\n";
  for (const auto& r : rows) os << r.t << ',' << r.report.tv << ',' << r.report.ent << ',' << r.report.ent_given_sign << '\n';
  return os.str();
}

}  // namespace ocs
