#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ocs {

// Bad caller input. The CLI maps it to exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Hypotheses cannot be met at this size. The CLI maps it to exit code 3.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sign structure of the two generators (1..m) and (1..n).
enum class ParityClass {
  Alternating,  // m, n both odd: walk lives in A_n
  Periodic,     // m, n both even: walk alternates between the two cosets
  Full,         // mixed parity: walk fills S_n
};

const char* to_string(ParityClass c);

class ShuffleParams {
 public:
  ShuffleParams(int n, int m, std::optional<double> epsilon = std::nullopt);

  // m = floor(alpha * n).
  static ShuffleParams from_alpha(int n, double alpha, std::optional<double> epsilon = std::nullopt);

  int n() const { return n_; }
  int m() const { return m_; }
  std::int64_t modulus() const { return 2 * static_cast<std::int64_t>(n_) - m_ + 1; }
  std::optional<double> epsilon() const { return epsilon_; }
  ParityClass parity() const;

  bool in_top(int pos) const { return pos < m_; }
  bool in_bottom(int pos) const { return pos > m_; }

 private:
  int n_;
  int m_;
  std::optional<double> epsilon_;
};

inline constexpr double kGoldenPhi = 0.61803398874989484820;  // (sqrt(5) - 1) / 2

}  // namespace ocs
