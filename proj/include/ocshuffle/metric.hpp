#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "ocshuffle/params.hpp"

namespace ocs {

// Witness (a, b) with omega = a + b*m mod modulus and value = |a| + |b| sqrt(n).
struct NormDecomposition {
  std::int64_t a = 0;
  std::int64_t b = 0;
  double value = 0.0;
};

inline constexpr double kNormTieTolerance = 1e-9;

std::int64_t position_weight(const ShuffleParams& p, int x);
std::int64_t reduce_mod(std::int64_t omega, std::int64_t modulus);
std::int64_t m_distance(const ShuffleParams& p, std::int64_t omega);

NormDecomposition norm(const ShuffleParams& p, std::int64_t omega);

// norm value of every residue 0..modulus-1, one pass per b.
std::vector<double> norm_table(const ShuffleParams& p);

double l_max(const ShuffleParams& p);
double l_max(const ShuffleParams& p, const std::vector<double>& table);

int gamma(const ShuffleParams& p, double ell);

// Positions (ascending) whose weight is a + b*m with |a| <= ell, |b| <= ell/sqrt(n).
std::vector<int> enumerate_N_ell(const ShuffleParams& p, double ell);

enum class SpreadMode {
  Strict,   // insists on 100 sqrt(n) < ell < l_max
  Relaxed,  // any ell < l_max, exhaustive fallback
};

struct SpreadTriple {
  std::array<int, 3> positions{};
  bool from_construction = false;  // false when the exhaustive fallback found it
  int halvings = 0;
};

// std::nullopt when no triple exists. InvalidArgument when Strict and ell is outside the range.
std::optional<SpreadTriple> spread_triple(const ShuffleParams& p, double ell,
                                          SpreadMode mode = SpreadMode::Relaxed);

bool spread_triple_valid(const ShuffleParams& p, double ell, const std::array<int, 3>& f);

std::int64_t select_time_T1(const ShuffleParams& p, std::int64_t s);
std::int64_t select_time_T2(const ShuffleParams& p, std::int64_t s);

int sigma_reorder(const ShuffleParams& p, int x);

struct MonteOrdering {
  std::vector<int> nu;                  // nu[card], index 0 unused
  std::vector<int> leading;             // cards n, n-1 ranked 1 and 2
  std::vector<std::vector<int>> blocks; // I_0, I_1, ..., I_a
  std::vector<double> thresholds;       // ell_k = 2^k sqrt(n), index 0 unused
  std::vector<int> J_sizes;             // |J_k|
  int a = 0;
};

MonteOrdering monte_ordering(const ShuffleParams& p);

struct GoldenGapReport {
  int N = 0;
  std::vector<double> gaps;          // sorted descending, N+1 circle arcs
  std::vector<double> distinct_gaps; // descending
  std::vector<int> exponents;        // z with distinct gap ~ phi^z
  double max_covering_distance = 0.0;
  double covering_bound = 0.0;
  bool three_distance_ok = false;
  bool consecutive_powers_ok = false;
  bool covering_ok = false;
  bool ok() const { return three_distance_ok && consecutive_powers_ok && covering_ok; }
};

GoldenGapReport golden_gap_report(int N);

struct GoldenLmaxCheck {
  int n = 0;
  int m = 0;
  double l_max = 0.0;
  double bound = 0.0;        // 6 n^{3/4}
  double lower_bound = 0.0;  // n^{3/4} / 2
  bool pass = false;
  bool lower_pass = false;
};

GoldenLmaxCheck golden_lmax_check(int n);

}  // namespace ocs
