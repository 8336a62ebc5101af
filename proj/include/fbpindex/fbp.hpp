// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Frequent binary pattern extraction.
//
// A length-k window slides over a binary template with stride 1.  Every one
// of the n-k+1 window values is counted; the resulting list of distinct
// patterns is ordered by (count descending, value ascending).  That tie rule
// is relied on everywhere: bin assignment, probe ordering and merging all
// assume it, so it must never change independently in one place.

#ifndef FBPINDEX_FBP_HPP_
#define FBPINDEX_FBP_HPP_

#include <cstdint>
#include <vector>

#include "fbpindex/bitvec.hpp"

namespace fbpindex {

// Largest supported window; counting uses a dense 2^k table.
inline constexpr int kMaxPatternBits = 16;

struct PatternCount {
  Pattern pattern;
  std::uint32_t count = 0;

  bool operator==(const PatternCount& o) const = default;
};

struct PatternList {
  int k = 0;
  std::size_t source_bits = 0;
  // Ordered by (count desc, value asc).
  std::vector<PatternCount> entries;
};

// Counts all sliding windows.  Requires 1 <= k <= kMaxPatternBits and
// k < t.size(); throws ArgumentError otherwise.
PatternList extract_patterns(const BinaryTemplate& t, int k);

// First entry of a non-empty list.
Pattern top_pattern(const PatternList& pl);

// True if entries are correctly ordered and counts sum to n-k+1.
bool check_pattern_list(const PatternList& pl);

}  // namespace fbpindex

#endif  // FBPINDEX_FBP_HPP_
