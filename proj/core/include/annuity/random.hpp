#pragma once

#include <array>
#include <cstdint>

namespace annuity {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Inverse standard normal CDF, Wichura's algorithm AS241 (PPND16).
double inverse_normal_cdf(double p);

// Deterministic normal draws addressed by (path, step). Each draw consumes one
// Philox block: counter = {step_lo, step_hi, path_lo, path_hi}, key = seed.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : seed_(seed) {}

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform(std::uint64_t path, std::uint64_t step) const;
  double normal(std::uint64_t path, std::uint64_t step) const;

 private:
  std::uint64_t seed_;
};

}  // namespace annuity
