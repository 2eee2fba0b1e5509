#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "ocshuffle/deck.hpp"
#include "ocshuffle/exact.hpp"

using namespace ocs;

namespace {

std::map<int, double> row_map(const SingleCardKernel& k, int from) {
  std::map<int, double> out;
  for (auto [to, pr] : k.row(from)) out[to] += pr;
  return out;
}

std::vector<double> brute_full_deck(const ShuffleParams& p, int t) {
  std::vector<double> out(factorial(p.n()), 0.0);
  for (std::uint32_t mask = 0; mask < (1U << t); ++mask) {
    std::vector<Coin> coins(t);
    for (int r = 0; r < t; ++r) coins[r] = (mask >> r) & 1U ? Coin::Tails : Coin::Heads;
    const DeckState d = run(p, coins, t);
    out[lehmer_rank({d.perm.begin() + 1, d.perm.end()})] += std::ldexp(1.0, -t);
  }
  return out;
}

}  // namespace

TEST_CASE("single-card kernel rows") {
  const SingleCardKernel k3(ShuffleParams(3, 2));
  CHECK(row_map(k3, 1) == std::map<int, double>{{2, 1.0}});
  CHECK(row_map(k3, 2) == std::map<int, double>{{1, 0.5}, {3, 0.5}});
  CHECK(row_map(k3, 3) == std::map<int, double>{{1, 0.5}, {3, 0.5}});
  const SingleCardKernel k5(ShuffleParams(5, 3));
  CHECK(row_map(k5, 4) == std::map<int, double>{{4, 0.5}, {5, 0.5}});
}

TEST_CASE("kernel is doubly stochastic and both applications agree") {
  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = std::uniform_int_distribution<int>(3, 200)(rng);
    const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
    const SingleCardKernel k(ShuffleParams(n, m));
    const auto dense = k.dense_row_major();
    for (int c = 0; c < n; ++c) {
      double col = 0.0, row = 0.0;
      for (int r = 0; r < n; ++r) {
        col += dense[static_cast<std::size_t>(r) * n + c];
        row += dense[static_cast<std::size_t>(c) * n + r];
      }
      CHECK(col == doctest::Approx(1.0));
      CHECK(row == doctest::Approx(1.0));
    }
    std::vector<double> v(n), a, b, ref(n, 0.0);
    for (double& x : v) x = std::uniform_real_distribution<double>(0, 1)(rng);
    k.apply(v, a);
    k.apply_serial(v, b);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) ref[c] += v[r] * dense[static_cast<std::size_t>(r) * n + c];
    for (int c = 0; c < n; ++c) {
      CHECK(a[c] == doctest::Approx(ref[c]).epsilon(1e-13));
      CHECK(b[c] == doctest::Approx(ref[c]).epsilon(1e-13));
    }
  }
  // large enough for the parallel branch
  const SingleCardKernel big(ShuffleParams(5000, 3090));
  std::vector<double> v(5000), a, b;
  for (int x = 0; x < 5000; ++x) v[x] = 1.0 / (x + 1);
  big.apply(v, a);
  big.apply_serial(v, b);
  for (int x = 0; x < 5000; ++x) CHECK(a[x] == doctest::Approx(b[x]).epsilon(1e-15));
  CHECK(big.coordinate_text().rfind("%%MatrixMarket", 0) == 0);
}

TEST_CASE("TV profile") {
  const ShuffleParams p(40, 17);
  const auto tv = tv_profile(SingleCardKernel(p), DistVector::point_position(40, 1), 2000);
  CHECK(tv[0] == doctest::Approx(1.0 - 1.0 / 40));
  for (std::size_t t = 1; t < tv.size(); ++t) CHECK(tv[t] <= tv[t - 1] + 1e-15);
  CHECK(tv.back() < 1e-3);
}

TEST_CASE("single-card mixing grows like n squared at rational ratio") {
  const auto a = t_single_mix(ShuffleParams::from_alpha(128, 0.5), 0.25);
  const auto b = t_single_mix(ShuffleParams::from_alpha(512, 0.5), 0.25);
  REQUIRE(a.t_mix);
  REQUIRE(b.t_mix);
  const double ratio = static_cast<double>(*b.t_mix) / static_cast<double>(*a.t_mix);
  CHECK(ratio >= 16.0 * 0.7);
  CHECK(ratio <= 16.0 * 1.3);
}

TEST_CASE("relaxation") {
  // n = 3, m = 2: rows 2 and 3 coincide and the trace is 1/2, so the spectrum is {1, 0, -1/2}
  const auto r3 = relaxation_dense(ShuffleParams(3, 2));
  CHECK(r3.lambda2 == doctest::Approx(0.5));
  CHECK(r3.gap == doctest::Approx(0.5));

  std::mt19937_64 rng(67);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = std::uniform_int_distribution<int>(3, 120)(rng);
    const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
    CHECK(relaxation_dense(ShuffleParams(n, m)).gap > 0.0);
  }
  const auto half = relaxation_dense(ShuffleParams::from_alpha(256, 0.5));
  const auto gold = relaxation_dense(ShuffleParams::from_alpha(256, kGoldenPhi));
  CHECK(gold.relaxation_time < half.relaxation_time);

  const ShuffleParams p(200, 77);
  const auto dense = relaxation_dense(p);
  const auto power = relaxation_power(p);
  CHECK(power.converged);
  CHECK(power.lambda2 == doctest::Approx(dense.lambda2).epsilon(1e-3));
}

TEST_CASE("Lehmer codes") {
  for (int n = 1; n <= 6; ++n)
    for (std::uint64_t r = 0; r < factorial(n); ++r) CHECK(lehmer_rank(lehmer_unrank(r, n)) == r);
  CHECK(lehmer_rank({1, 2, 3, 4}) == 0);
  CHECK(perm_sign({2, 1, 3}) == -1);
  CHECK(perm_sign({2, 3, 1}) == 1);
}

TEST_CASE("full-deck law equals enumeration over coin strings") {
  for (auto [n, m] : {std::pair{4, 2}, std::pair{5, 3}, std::pair{5, 2}, std::pair{6, 4}}) {
    const ShuffleParams p(n, m);
    for (int t = 0; t <= 9; ++t) {
      const auto d = full_deck_dist(p, t);
      const auto want = brute_full_deck(p, t);
      for (std::size_t r = 0; r < want.size(); ++r) CHECK(d.prob[r] == doctest::Approx(want[r]).epsilon(1e-14));
    }
  }
  const ShuffleParams p(7, 4);
  std::vector<double> v(factorial(7)), a, b;
  for (std::size_t r = 0; r < v.size(); ++r) v[r] = 1.0 / (r + 1);
  full_deck_step(p, v, a);
  full_deck_step_serial(p, v, b);
  for (std::size_t r = 0; r < v.size(); ++r) CHECK(a[r] == doctest::Approx(b[r]).epsilon(1e-15));
  CHECK_THROWS_AS(full_deck_dist(ShuffleParams(9, 4), 1), InvalidArgument);
}

TEST_CASE("full-deck support and parity") {
  CHECK(full_deck_dist(ShuffleParams(5, 3), 0).prob[0] == 1.0);
  for (int t = 0; t <= 12; ++t) {
    const auto odd = full_deck_dist(ShuffleParams(5, 3), t);
    for (std::size_t r = 0; r < odd.prob.size(); ++r)
      if (odd.prob[r] > 0.0) CHECK(perm_sign(lehmer_unrank(r, 5)) == 1);
    const auto even = full_deck_dist(ShuffleParams(6, 4), t);
    for (std::size_t r = 0; r < even.prob.size(); ++r)
      if (even.prob[r] > 0.0) CHECK(perm_sign(lehmer_unrank(r, 6)) == (t % 2 ? -1 : 1));
  }
}

TEST_CASE("entropy reports") {
  const int n = 5;
  const double nf = 120.0;
  DistVector point{Support::Permutations, n, std::vector<double>(120, 0.0)};
  point.prob[0] = 1.0;
  auto rep = entropy_report(point, CosetTarget::All);
  CHECK(rep.ent == doctest::Approx(std::log(nf)));
  CHECK(rep.ent_given_sign == doctest::Approx(std::log(nf / 2.0)));
  CHECK(rep.pinsker_ok);
  CHECK(std::isinf(entropy_report(point, CosetTarget::Odd).ent));

  DistVector uni{Support::Permutations, n, std::vector<double>(120, 1.0 / nf)};
  rep = entropy_report(uni, CosetTarget::All);
  CHECK(rep.ent == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.tv == doctest::Approx(0.0).epsilon(1e-12));

  DistVector even{Support::Permutations, n, std::vector<double>(120, 0.0)};
  for (std::uint64_t r = 0; r < 120; ++r)
    if (perm_sign(lehmer_unrank(r, n)) == 1) even.prob[r] = 2.0 / nf;
  rep = entropy_report(even, CosetTarget::Even);
  CHECK(rep.ent == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.tv_full == doctest::Approx(0.5));
}

TEST_CASE("exact mixing of tiny decks") {
  const ShuffleParams p(5, 3);
  const auto loose = mixing_time_exact_small(p, 0.99, 50);
  REQUIRE(loose.t_mix);
  CHECK(*loose.t_mix <= 3);
  const auto a = mixing_time_exact_small(p, 0.25, 100);
  const auto b = mixing_time_exact_small(p, 0.25, 100);
  REQUIRE(a.t_mix);
  CHECK(a.t_mix == b.t_mix);
  for (const auto& r : a.profile) CHECK(r.report.pinsker_ok);

  const auto per = mixing_time_exact_small(ShuffleParams(6, 4), 0.25, 150);
  REQUIRE(per.t_mix);
  for (const auto& r : per.profile) CHECK(r.report.tv_full >= 0.5 - 1e-12);
  CHECK(exact_profile_csv(per.profile).rfind("t,tv,ent,ent_given_sign\n", 0) == 0);
  CHECK_THROWS_AS(mixing_time_exact_small(ShuffleParams(8, 3), 0.25, 10), InvalidArgument);
}
