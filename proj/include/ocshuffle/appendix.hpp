#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ocs {

double tv_distance(const std::vector<double>& mu, const std::vector<double>& nu);

// Hypotheses: mu(w) >= 1/(D |Omega|) everywhere and mu(E) >= 1 - 1/(8D).
bool quasi_uniform_hypotheses(const std::vector<double>& mu, const std::vector<bool>& event, double D);
// Number of w with mu(w | E) > 1/(2 D |Omega|).
int quasi_uniform_count(const std::vector<double>& mu, const std::vector<bool>& event, double D);

struct GeneralQuasiCase {
  double eps = 0.0, delta = 0.0;  // fractions failing the mu >= a/|Omega| and nu <= b/|Omega| conditions
  double tv = 0.0;
  double bound = 0.0;  // (1 - eps)(1 - delta)(a - b)
  bool holds = true;
  // The two good sets only provably share 1 - eps - delta of the space.
  double corrected_bound = 0.0;  // max(0, 1 - eps - delta)(a - b)
  bool corrected_holds = true;
};

// eps and delta are the smallest values the data allow.
GeneralQuasiCase quasi_uniform_general(const std::vector<double>& mu, const std::vector<double>& nu, double a, double b);

struct QuasiUniformReport {
  std::int64_t special_cases = 0;
  std::int64_t general_cases = 0;
  std::int64_t grid_cases = 0;
  bool special_pass = true;            // random and grid cases of the 3/4 counting statement
  bool general_pass = true;            // product form of the TV bound
  bool general_corrected_pass = true;  // inclusion-exclusion form
  std::int64_t general_failures = 0;
  std::string counterexample;          // first special failure, else first general failure
  bool pass() const { return special_pass && general_pass && general_corrected_pass; }
};

QuasiUniformReport appendix_quasi_uniform_check(std::int64_t random_cases, std::uint64_t seed = 7);

// log P(X >= x) for X ~ Bin(n, p), x = 0..n+1 (entry n+1 is -inf).
std::vector<double> log_binomial_upper_tails(int n, double p);

// P(max_{s<=t} |X_s| >= L) for the simple walk: series of images with period 4L.
double walk_abs_max_tail(int t, int L);
// Same quantity by dynamic programming over the killed walk. Reference.
double walk_abs_max_tail_dp(int t, int L);

struct RwBoundsReport {
  int n_max = 0;
  std::int64_t inverse_points = 0, hoeffding_points = 0, abs_points = 0, max_points = 0;
  bool inverse_ok = true, hoeffding_ok = true, abs_ok = true, max_ok = true;
  std::string first_violation;
  bool pass() const { return inverse_ok && hoeffding_ok && abs_ok && max_ok; }
};

// Every n in 1..n_max: the inverse bound for integer 0 <= k <= n/2, the upper
// bound for p in {0.1, 0.25, 0.5, 0.75, 0.9} and integer k, and the two walk
// bounds for a in {0.5, 1, ..., 6}. Parallel over n.
RwBoundsReport appendix_rw_bounds_check(int n_max);
RwBoundsReport appendix_rw_bounds_check_serial(int n_max);

struct GoldenSweep {
  int n_max = 0;
  int checked = 0;
  int first_failure = 0;  // 0 when none
  bool pass = true;
};

// golden_gap_report for every N in 1..n_max.
GoldenSweep golden_gap_sweep(int n_max);

}  // namespace ocs
