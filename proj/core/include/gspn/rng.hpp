#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gspn {

// Seeded stream of exponential variates. The engine is std::mt19937_64,
// whose output sequence is fixed by the standard; the uniform and
// exponential transforms are done here so results do not depend on the
// standard library's distribution implementations.
class ExponentialStream {
 public:
  static constexpr const char* kEngineName = "mt19937_64";

  explicit ExponentialStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Inverse CDF: -ln(1 - U) / rate.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gspn
