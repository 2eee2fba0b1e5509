#include "ocshuffle/params.hpp"

#include <cmath>
#include <string>

namespace ocs {

const char* to_string(ParityClass c) {
  switch (c) {
    case ParityClass::Alternating: return "alternating";
    case ParityClass::Periodic: return "periodic";
    case ParityClass::Full: return "full";
  }
  return "?";
}

ShuffleParams::ShuffleParams(int n, int m, std::optional<double> epsilon)
    : n_(n), m_(m), epsilon_(epsilon) {
  if (n < 3) throw InvalidArgument("n must be at least 3, got " + std::to_string(n));
  if (m < 2 || m > n - 1)
    throw InvalidArgument("m must satisfy 2 <= m <= n-1, got n=" + std::to_string(n) +
                          " m=" + std::to_string(m));
  if (epsilon) {
    double e = *epsilon;
    if (!(e > 0.0 && e < 0.5)) throw InvalidArgument("epsilon must lie in (0, 1/2)");
    double r = static_cast<double>(m) / n;
    if (!(e < r && r < 1.0 - e))
      throw InvalidArgument("m/n = " + std::to_string(r) + " violates the epsilon bound " +
                            std::to_string(e));
  }
}

ShuffleParams ShuffleParams::from_alpha(int n, double alpha, std::optional<double> epsilon) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  return ShuffleParams(n, static_cast<int>(std::floor(alpha * n)), epsilon);
}

ParityClass ShuffleParams::parity() const {
  bool m_odd = m_ % 2 == 1;
  bool n_odd = n_ % 2 == 1;
  if (m_odd && n_odd) return ParityClass::Alternating;
  if (!m_odd && !n_odd) return ParityClass::Periodic;
  return ParityClass::Full;
}

}  // namespace ocs
