// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "fbpindex/bitvec.hpp"
#include "fbpindex/rng.hpp"

using namespace fbpindex;

TEST_CASE("templates start zeroed and keep their length") {
  BinaryTemplate t(70);
  CHECK(t.size() == 70);
  CHECK(t.popcount() == 0);
  for (std::size_t i = 0; i < 70; ++i) CHECK_FALSE(t.bit(i));
  t.set_bit(0, true);
  t.set_bit(69, true);
  CHECK(t.bit(0));
  CHECK(t.bit(69));
  CHECK(t.popcount() == 2);
  t.set_bit(0, false);
  CHECK_FALSE(t.bit(0));
}

TEST_CASE("string round-trip preserves every bit") {
  const std::string s = "0101100111010001";
  const auto t = BinaryTemplate::from_string(s);
  CHECK(t.size() == s.size());
  CHECK(t.to_string() == s);
  CHECK(BinaryTemplate::from_string(t.to_string()) == t);
  CHECK_THROWS_AS(BinaryTemplate::from_string("01x1"), ParseError);
}

TEST_CASE("hex form is msb-first with zero padding") {
  // 12 bits: 1010 1111 0001 -> bytes a f, 1 0 (pad) -> "af10".
  const auto t = BinaryTemplate::from_string("101011110001");
  CHECK(t.to_hex() == "af10");
  CHECK(BinaryTemplate::from_hex("af10", 12) == t);

  CHECK_THROWS_AS(BinaryTemplate::from_hex("af1", 12), ParseError);
  CHECK_THROWS_AS(BinaryTemplate::from_hex("af1g", 12), ParseError);
  // Nonzero padding bits must be rejected, not masked away.
  CHECK_THROWS_AS(BinaryTemplate::from_hex("af1f", 12), ParseError);
}

TEST_CASE("windows read k bits msb-first across word boundaries") {
  rng::Xoshiro256ss g(11);
  BinaryTemplate t(130);
  for (std::size_t i = 0; i < t.size(); ++i) t.set_bit(i, g.next() & 1);
  for (const int k : {1, 5, 8, 13, 31, 64}) {
    for (std::size_t pos = 0; pos + static_cast<std::size_t>(k) <= t.size();
         pos += 7) {
      std::uint64_t want = 0;
      for (int j = 0; j < k; ++j)
        want = (want << 1) | static_cast<std::uint64_t>(
                                 t.bit(pos + static_cast<std::size_t>(j)));
      CHECK(t.window(pos, k) == want);
    }
  }
}

TEST_CASE("hamming distance matches a per-position loop") {
  CHECK(hamming_distance(BinaryTemplate::from_string("0000"),
                         BinaryTemplate::from_string("0101")) == 2);
  const auto x = BinaryTemplate::from_string("110010");
  CHECK(hamming_distance(x, x) == 0);

  rng::Xoshiro256ss g(23);
  for (int it = 0; it < 1000; ++it) {
    BinaryTemplate a(64);
    BinaryTemplate b(64);
    for (std::size_t i = 0; i < 64; ++i) {
      a.set_bit(i, g.next() & 1);
      b.set_bit(i, g.next() & 1);
    }
    std::size_t want = 0;
    for (std::size_t i = 0; i < 64; ++i) want += a.bit(i) != b.bit(i);
    CHECK(hamming_distance(a, b) == want);
  }

  CHECK_THROWS_AS(hamming_distance(BinaryTemplate(4), BinaryTemplate(5)),
                  DimensionError);
}

TEST_CASE("concatenation appends in argument order") {
  const auto a = BinaryTemplate::from_string("01");
  const auto b = BinaryTemplate::from_string("10");
  CHECK(concat({a, b}).to_string() == "0110");
  CHECK(concat({a}) == a);

  const std::vector<BinaryTemplate> parts(3, BinaryTemplate(512));
  CHECK(concat(parts).size() == 1536);

  // Word-misaligned parts must still land on the right bit offsets.
  const auto c = BinaryTemplate::from_string("111");
  const auto d = BinaryTemplate::from_string("00001");
  CHECK(concat({c, d, c}).to_string() == "11100001111");
}

TEST_CASE("patterns validate their width") {
  CHECK_THROWS_AS(make_pattern(0, 0), ArgumentError);
  CHECK_THROWS_AS(make_pattern(0, 64), ArgumentError);
  CHECK_THROWS_AS(make_pattern(8, 3), ArgumentError);
  const auto p = make_pattern(5, 3);
  CHECK(p.value == 5);
  CHECK(p.k == 3);
}

TEST_CASE("pattern xor follows the truth table") {
  const auto p101 = make_pattern(0b101, 3);
  const auto p011 = make_pattern(0b011, 3);
  const auto p110 = make_pattern(0b110, 3);
  const auto zero = make_pattern(0, 3);
  CHECK(xor_patterns(p101, p011) == p110);
  CHECK(xor_patterns(p101, zero) == p101);
  CHECK(xor_patterns(xor_patterns(p101, p011), p110) == zero);
  CHECK_THROWS_AS(xor_patterns(p101, make_pattern(1, 2)), DimensionError);
}

TEST_CASE("pattern text form round-trips for every value") {
  for (int k = 1; k <= 8; ++k) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << k); ++v) {
      const auto p = make_pattern(v, k);
      const auto s = pattern_to_string(p);
      REQUIRE(s.size() == static_cast<std::size_t>(k));
      std::uint64_t back = 0;
      for (const char c : s) back = (back << 1) | (c == '1');
      CHECK(back == v);
    }
  }
}
