// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "fbpindex/bitvec.hpp"

#include <bit>

namespace fbpindex {

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr char kHexDigits[] = "0123456789abcdef";

}  // namespace

BinaryTemplate::BinaryTemplate(std::size_t n_bits)
    : n_(n_bits), words_((n_bits + 63) / 64, 0) {}

BinaryTemplate BinaryTemplate::from_string(const std::string& bits) {
  BinaryTemplate t(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1')
      t.set_bit(i, true);
    else if (bits[i] != '0')
      throw ParseError("binary string may contain only '0' and '1'");
  }
  return t;
}

BinaryTemplate BinaryTemplate::from_hex(const std::string& hex,
                                        std::size_t n_bits) {
  const std::size_t want = 2 * ((n_bits + 7) / 8);
  if (hex.size() != want)
    throw ParseError("hex template has " + std::to_string(hex.size()) +
                     " digits, expected " + std::to_string(want));
  BinaryTemplate t(n_bits);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const int v = hex_nibble(hex[i]);
    if (v < 0) throw ParseError("invalid hex digit in template");
    for (int b = 0; b < 4; ++b) {
      const std::size_t pos = 4 * i + b;
      const bool bit = (v >> (3 - b)) & 1;
      if (pos < n_bits) {
        t.set_bit(pos, bit);
      } else if (bit) {
        throw ParseError("nonzero padding bits in hex template");
      }
    }
  }
  return t;
}

std::uint64_t BinaryTemplate::window(std::size_t pos, int k) const {
  const std::size_t w = pos >> 6;
  const int off = static_cast<int>(pos & 63);
  std::uint64_t v = words_[w];
  if (off != 0) {
    const std::uint64_t lo = (w + 1 < words_.size()) ? words_[w + 1] : 0;
    v = (v << off) | (lo >> (64 - off));
  }
  return (k == 64) ? v : (v >> (64 - k));
}

std::size_t BinaryTemplate::popcount() const {
  std::size_t c = 0;
  for (const auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::string BinaryTemplate::to_hex() const {
  const std::size_t bytes = (n_ + 7) / 8;
  std::string out(2 * bytes, '0');
  for (std::size_t i = 0; i < bytes; ++i) {
    const std::uint64_t w = words_[i / 8];
    const auto byte =
        static_cast<unsigned>((w >> (8 * (7 - (i & 7)))) & 0xffu);
    out[2 * i] = kHexDigits[byte >> 4];
    out[2 * i + 1] = kHexDigits[byte & 0xf];
  }
  return out;
}

std::string BinaryTemplate::to_string() const {
  std::string out(n_, '0');
  for (std::size_t i = 0; i < n_; ++i)
    if (bit(i)) out[i] = '1';
  return out;
}

std::size_t hamming_distance(const BinaryTemplate& a, const BinaryTemplate& b) {
  if (a.size() != b.size())
    throw DimensionError("hamming distance of unequal lengths: " +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  std::size_t d = 0;
  const auto& wa = a.words();
  const auto& wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i)
    d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

BinaryTemplate concat(const std::vector<BinaryTemplate>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  BinaryTemplate out(total);
  std::size_t at = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.size(); ++i, ++at) out.set_bit(at, p.bit(i));
  }
  return out;
}

Pattern make_pattern(std::uint64_t value, int k) {
  if (k < 1 || k > 63)
    throw ArgumentError("pattern length must be in [1, 63], got " +
                        std::to_string(k));
  if (value >> k)
    throw ArgumentError("pattern value does not fit in " + std::to_string(k) +
                        " bits");
  return Pattern{value, k};
}

Pattern xor_patterns(const Pattern& a, const Pattern& b) {
  if (a.k != b.k)
    throw DimensionError("cannot XOR patterns of lengths " +
                         std::to_string(a.k) + " and " + std::to_string(b.k));
  return Pattern{a.value ^ b.value, a.k};
}

std::string pattern_to_string(const Pattern& p) {
  std::string out(static_cast<std::size_t>(p.k), '0');
  for (int i = 0; i < p.k; ++i)
    if ((p.value >> (p.k - 1 - i)) & 1) out[static_cast<std::size_t>(i)] = '1';
  return out;
}

}  // namespace fbpindex
