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

#include "geocorpus/numeric.h"

#include <cmath>
#include <cstdio>

namespace geocorpus {
namespace {

uint64_t SplitMix64(uint64_t& x) {
  uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t Rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

double RoundHalfAway(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = value * scale;
  double whole = std::trunc(scaled);
  const double frac = std::fabs(scaled - whole);
  if (frac >= 0.5 - 1e-9) whole += (scaled < 0 ? -1.0 : 1.0);
  double out = whole / scale;
  if (out == 0.0) out = 0.0;  // no "-0.000"
  return out;
}

std::string FormatFixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", RoundHalfAway(value, 3));
  return buf;
}

std::string FormatSigned3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.3f", RoundHalfAway(value, 3));
  return buf;
}

DeterministicRng::DeterministicRng(uint64_t seed) {
  for (uint64_t& s : state_) s = SplitMix64(seed);
}

uint64_t DeterministicRng::Next() {
  const uint64_t result = Rotl(state_[1] * 5, 7) * 9;
  const uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = Rotl(state_[3], 45);
  return result;
}

uint64_t DeterministicRng::Below(uint64_t bound) {
  if (bound <= 1) return 0;
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = Next();
  } while (x >= limit);
  return x % bound;
}

double DeterministicRng::Unit() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

uint64_t MixSeed(uint64_t seed, std::string_view salt) {
  // FNV-1a over the salt, folded into the seed.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : salt) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  uint64_t x = seed ^ h;
  return SplitMix64(x);
}

}  // namespace geocorpus
