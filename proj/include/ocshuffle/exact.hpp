#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ocshuffle/params.hpp"

namespace ocs {

enum class Support { Positions, Permutations };

// prob[0..size) indexed by position - 1, or by Lehmer rank for permutations.
struct DistVector {
  Support support = Support::Positions;
  int n = 0;
  std::vector<double> prob;

  double total() const;  // compensated
  bool valid(double tol = 1e-12) const;

  static DistVector point_position(int n, int pos);
  static DistVector uniform_positions(int n);
};

// Where one card goes in one step: two nonzeros per row.
class SingleCardKernel {
 public:
  explicit SingleCardKernel(const ShuffleParams& p) : n_(p.n()), m_(p.m()) {}

  int n() const { return n_; }
  int m() const { return m_; }

  // (to, probability) pairs of row `from`, 1-based, merged when equal.
  std::vector<std::pair<int, double>> row(int from) const;

  // dist <- dist * K. Pull form, parallel over target positions.
  void apply(const std::vector<double>& in, std::vector<double>& out) const;
  // Push form, one source row at a time. Reference for apply.
  void apply_serial(const std::vector<double>& in, std::vector<double>& out) const;

  std::vector<double> dense_row_major() const;
  // Matrix Market coordinate text, 1-based.
  std::string coordinate_text() const;

 private:
  int n_, m_;
};

double tv_to_uniform(const std::vector<double>& dist);

// TV to uniform at t = 0..horizon.
std::vector<double> tv_profile(const SingleCardKernel& k, const DistVector& start, std::int64_t horizon);

struct SingleMix {
  std::optional<std::int64_t> t_mix;
  double last_tv = 1.0;
  std::int64_t steps = 0;
};

// First t with TV(start_pos after t steps, uniform) <= delta.
SingleMix t_single_mix(const ShuffleParams& p, double delta, int start_pos = 1, std::int64_t max_steps = 100000000);

struct RelaxationReport {
  std::string method;  // "dense" or "power"
  double lambda2 = 0.0;  // second largest eigenvalue modulus
  double gap = 0.0;
  double relaxation_time = 0.0;
  bool converged = true;
  double residual = 0.0;
  std::int64_t iterations = 0;
};

// Dense nonsymmetric eigensolve, n <= 512.
RelaxationReport relaxation_dense(const ShuffleParams& p);
// Power iteration on the operator restricted to mean-zero vectors.
RelaxationReport relaxation_power(const ShuffleParams& p, std::int64_t iterations = 200000, double tol = 1e-3);
// Dense when n <= 512, power iteration otherwise.
RelaxationReport relaxation_estimate(const ShuffleParams& p);

// Permutations of size n <= 8 ranked by Lehmer code; perm is position -> card, 1-based values.
std::uint64_t factorial(int n);
std::uint64_t lehmer_rank(const std::vector<int>& perm);
std::vector<int> lehmer_unrank(std::uint64_t rank, int n);
int perm_sign(const std::vector<int>& perm);

inline constexpr int kFullDeckCap = 8;
inline constexpr int kFullDeckDefaultCap = 7;

// Exact law after t steps from the identity deck. Pull over ranks, parallel.
DistVector full_deck_dist(const ShuffleParams& p, std::int64_t t);
// One pull step; the serial variant pushes mass from each rank to its two successors.
void full_deck_step(const ShuffleParams& p, const std::vector<double>& in, std::vector<double>& out);
void full_deck_step_serial(const ShuffleParams& p, const std::vector<double>& in, std::vector<double>& out);

enum class CosetTarget { All, Even, Odd };
const char* to_string(CosetTarget c);
// Uniform target after t steps: A_n, S_n, or the coset of sign (-1)^t.
CosetTarget coset_target(const ShuffleParams& p, std::int64_t t);

struct EntropyReport {
  CosetTarget target = CosetTarget::All;
  double ent = 0.0;             // nats, relative to uniform on the target
  double ent_given_sign = 0.0;  // nats, sign-conditioned
  double tv = 0.0;              // to uniform on the target
  double tv_full = 0.0;         // to uniform on S_n
  bool pinsker_ok = true;
};

EntropyReport entropy_report(const DistVector& dist, const ShuffleParams& p, std::int64_t t);
EntropyReport entropy_report(const DistVector& dist, CosetTarget target);

struct ExactProfileRow {
  std::int64_t t = 0;
  EntropyReport report;
};

struct ExactMix {
  std::optional<std::int64_t> t_mix;
  double last_tv = 1.0;
  std::vector<ExactProfileRow> profile;
};

// Runs to `horizon` (or until TV <= delta when stop_at_mix). n <= 7 unless allow_large.
ExactMix mixing_time_exact_small(const ShuffleParams& p, double delta, std::int64_t horizon = 400,
                                 bool allow_large = false, bool stop_at_mix = false);

// CSV: t,tv,ent,ent_given_sign
std::string exact_profile_csv(const std::vector<ExactProfileRow>& rows);

}  // namespace ocs
