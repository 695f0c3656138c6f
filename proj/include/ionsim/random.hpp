#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ionsim {

/// Seeded uniform draws on (0, 1] built directly from mt19937_64 bits, so a
/// seed reproduces the same stream on every standard library.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

/// Smallest index whose cumulative probability reaches u. A draw on a
/// cumulative boundary goes to the lower index; outcomes of zero probability
/// are never returned for u in (0, 1].
inline std::size_t inverse_cdf_index(std::span<const double> probabilities, double u) {
  double cumulative = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    cumulative += probabilities[i];
    last_nonzero = i;
    if (u <= cumulative) return i;
  }
  return last_nonzero;
}

}  // namespace ionsim
