// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Seeded, portable random number generation.
//
// Everything random in this project flows from a single 64-bit seed through
// the derivation helpers below, so a run is reproducible bit for bit across
// platforms.  std::mt19937 / std::normal_distribution are avoided on purpose:
// the standard does not pin down distribution output sequences.

#ifndef FBPINDEX_RNG_HPP_
#define FBPINDEX_RNG_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace fbpindex::rng {

// Finalizer from the splitmix64 generator.  Also used to mix derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256** 1.0, seeded through SplitMix64 as its authors recommend.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_;
};

// Standard normal deviates via Box-Muller on xoshiro output.  Both halves of
// each pair are consumed, so a stream yields one gaussian per call but only
// advances the underlying generator every second call.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
    const double u1 =
        static_cast<double>((gen_.next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  Xoshiro256ss gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// FNV-1a.  Used to key per-characteristic streams by name rather than by
// position, so reordering characteristics in a configuration cannot change
// any drawn value.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Derives an independent child seed.  Chained for multi-part contexts.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ (tag + 0x9E3779B97F4A7C15ull));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b) {
  return derive(derive(seed, a), b);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b, std::uint64_t c) {
  return derive(derive(seed, a, b), c);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b, std::uint64_t c,
                               std::uint64_t d) {
  return derive(derive(seed, a, b, c), d);
}

}  // namespace fbpindex::rng

#endif  // FBPINDEX_RNG_HPP_
