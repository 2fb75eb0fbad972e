// Copyright 2026 The geocorpus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Rounding, formatting and deterministic randomness shared by the scoring and
// sampling code.

#ifndef GEOCORPUS_NUMERIC_H_
#define GEOCORPUS_NUMERIC_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geocorpus {

// Rounds half away from zero to `decimals` places. Inputs that sit within
// 1e-9 (scaled) of a half boundary are treated as exact halves, which absorbs
// binary representation error in values such as 0.6975.
double RoundHalfAway(double value, int decimals = 3);

// "0.900", "-0.032".
std::string FormatFixed3(double value);
// "+0.069", "-0.032", "+0.000".
std::string FormatSigned3(double value);

// xoshiro256** seeded through splitmix64. Used instead of <random>
// distributions, whose outputs differ between standard libraries.
class DeterministicRng {
 public:
  explicit DeterministicRng(uint64_t seed);
  uint64_t Next();
  // Uniform in [0, bound).
  uint64_t Below(uint64_t bound);
  // Uniform in [0, 1).
  double Unit();

 private:
  uint64_t state_[4];
};

uint64_t MixSeed(uint64_t seed, std::string_view salt);

// Fisher-Yates over DeterministicRng::Below.
template <typename T>
void DeterministicShuffle(std::vector<T>& items, DeterministicRng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.Below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace geocorpus

#endif  // GEOCORPUS_NUMERIC_H_
