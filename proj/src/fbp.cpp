// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "fbpindex/fbp.hpp"

#include <algorithm>
#include <string>

namespace fbpindex {

PatternList extract_patterns(const BinaryTemplate& t, int k) {
  if (k < 1 || k > kMaxPatternBits)
    throw ArgumentError("pattern length must be in [1, " +
                        std::to_string(kMaxPatternBits) + "], got " +
                        std::to_string(k));
  if (static_cast<std::size_t>(k) >= t.size())
    throw ArgumentError("pattern length " + std::to_string(k) +
                        " must be smaller than the template length " +
                        std::to_string(t.size()));

  std::vector<std::uint32_t> counts(std::size_t{1} << k, 0);
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  std::uint64_t w = 0;
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    w = ((w << 1) | static_cast<std::uint64_t>(t.bit(i))) & mask;
    if (i + 1 >= static_cast<std::size_t>(k)) ++counts[w];
  }

  PatternList pl;
  pl.k = k;
  pl.source_bits = n;
  for (std::uint64_t v = 0; v < counts.size(); ++v) {
    if (counts[v])
      pl.entries.push_back(PatternCount{Pattern{v, k}, counts[v]});
  }
  // Entries were gathered in ascending value order; a stable sort on the
  // count alone therefore yields (count desc, value asc).
  std::stable_sort(pl.entries.begin(), pl.entries.end(),
                   [](const PatternCount& a, const PatternCount& b) {
                     return a.count > b.count;
                   });
  return pl;
}

Pattern top_pattern(const PatternList& pl) {
  if (pl.entries.empty())
    throw StateError("cannot take the top pattern of an empty list");
  return pl.entries.front().pattern;
}

bool check_pattern_list(const PatternList& pl) {
  if (pl.k < 1) return false;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < pl.entries.size(); ++i) {
    const auto& e = pl.entries[i];
    if (e.pattern.k != pl.k || e.count == 0) return false;
    if (i > 0) {
      const auto& p = pl.entries[i - 1];
      const bool ordered = p.count > e.count ||
                           (p.count == e.count &&
                            p.pattern.value < e.pattern.value);
      if (!ordered) return false;
    }
    total += e.count;
  }
  return total == pl.source_bits - static_cast<std::size_t>(pl.k) + 1;
}

}  // namespace fbpindex
