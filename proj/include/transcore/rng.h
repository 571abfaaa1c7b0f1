/* Copyright 2026 The transcore Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef TRANSCORE_RNG_H_
#define TRANSCORE_RNG_H_

#include <array>
#include <cstdint>

namespace transcore {

// SplitMix64 step: advances `state` by the golden gamma and returns the
// mixed output.
inline std::uint64_t SplitMix64Next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256** seeded by four SplitMix64 outputs. Every distortion draws
// from this stream so results are reproducible from (seed, call order).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = SplitMix64Next(sm);
  }

  static RngStream FromState(const std::array<std::uint64_t, 4>& state) {
    RngStream rng(0);
    rng.state_ = state;
    return rng;
  }

  std::uint64_t Next() {
    const std::uint64_t result = Rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = Rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0,1) from the top 53 bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Standard normal via Box-Muller. Each pair of uniforms (u1, u2) yields
  // r*cos(2*pi*u2) first and r*sin(2*pi*u2) on the following call, with
  // r = sqrt(-2 ln(1 - u1)).
  double Normal();

  const std::array<std::uint64_t, 4>& state() const { return state_; }

 private:
  static std::uint64_t Rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  bool has_spare_ = false;
  double spare_r_ = 0.0;
  double spare_theta_ = 0.0;
};

}  // namespace transcore

#endif  // TRANSCORE_RNG_H_
