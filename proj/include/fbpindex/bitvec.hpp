// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FBPINDEX_BITVEC_HPP_
#define FBPINDEX_BITVEC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "fbpindex/errors.hpp"

namespace fbpindex {

// Fixed-length bit string.  Bit 0 is the most significant bit of word 0;
// unused trailing bits of the last word are always zero.
class BinaryTemplate {
 public:
  BinaryTemplate() = default;
  explicit BinaryTemplate(std::size_t n_bits);

  // Parses a string of '0'/'1' characters.
  static BinaryTemplate from_string(const std::string& bits);
  // Parses the hex form produced by to_hex().  Throws ParseError on bad
  // characters, wrong length or nonzero padding bits.
  static BinaryTemplate from_hex(const std::string& hex, std::size_t n_bits);

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  bool bit(std::size_t i) const {
    return (words_[i >> 6] >> (63 - (i & 63))) & 1u;
  }
  void set_bit(std::size_t i, bool v) {
    const std::uint64_t m = 1ull << (63 - (i & 63));
    if (v)
      words_[i >> 6] |= m;
    else
      words_[i >> 6] &= ~m;
  }

  // k consecutive bits starting at pos, MSB first, as an integer.
  // Requires pos + k <= size() and 1 <= k <= 64.
  std::uint64_t window(std::size_t pos, int k) const;

  std::size_t popcount() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  // Hex, ceil(n/8) bytes, bit 0 in the high nibble of the first byte.
  std::string to_hex() const;
  std::string to_string() const;

  bool operator==(const BinaryTemplate& o) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

std::size_t hamming_distance(const BinaryTemplate& a, const BinaryTemplate& b);

// Concatenation in argument order; the result has the summed length.
BinaryTemplate concat(const std::vector<BinaryTemplate>& parts);

// A k-bit pattern value.  value holds the bits MSB-first in its low k bits.
struct Pattern {
  std::uint64_t value = 0;
  int k = 0;

  bool operator==(const Pattern& o) const = default;
};

// Validates 1 <= k <= 63 and value < 2^k.
Pattern make_pattern(std::uint64_t value, int k);

// XOR of two patterns of equal length.
Pattern xor_patterns(const Pattern& a, const Pattern& b);

std::string pattern_to_string(const Pattern& p);

}  // namespace fbpindex

#endif  // FBPINDEX_BITVEC_HPP_
