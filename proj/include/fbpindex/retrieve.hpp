// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Bin-limited retrieval.
//
// A probe visits at most t bins in a strategy-defined order and compares
// against their members only.  The workload of a search is
//   comparisons = m * sum(|b_i|) over the visited bins,
// m being the number of characteristics; the exhaustive baseline is N * m.

#ifndef FBPINDEX_RETRIEVE_HPP_
#define FBPINDEX_RETRIEVE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fbpindex/index.hpp"

namespace fbpindex {

// Bin visit order for a probe.  Candidate bins carry distinct patterns; the
// sequence never exceeds 2^k entries.
//   feature_concat  pattern list of the concatenated probe templates
//   ranked_codes    per-characteristic lists merged, duplicates keep their
//                   highest count, then (count desc, value asc)
//   xor_codes       XOR values of per-characteristic entry tuples, walked in
//                   rank-sum levels: level s holds all tuples whose entry
//                   ranks sum to s, its values appended in ascending order
//                   with previously seen values dropped.  Enumeration stops
//                   before a level that would push the evaluated tuple count
//                   past m * 2^k, so the order is independent of the
//                   characteristic permutation.
std::vector<Pattern> probe_sequence(
    const std::vector<ProtectedTemplate>& probe, Strategy strategy, int k);

struct SearchOptions {
  // When true (the default) a visited empty bin consumes one of the t
  // slots; when false empty bins are skipped without charge.
  bool empty_bins_consume_budget = true;

  bool operator==(const SearchOptions& o) const = default;
};

struct VisitStep {
  Pattern pattern;
  std::uint32_t occupancy = 0;
};

// Visits bins of the table in sequence order until t slots are used or the
// sequence ends.
std::vector<VisitStep> walk_bins(const std::vector<Pattern>& sequence,
                                 const BinTable& table, std::size_t t,
                                 const SearchOptions& opts = {});

struct ScoreStats {
  double mean = 0.0;
  double stddev = 0.0;
};

// Per-characteristic z-score calibration, keyed by characteristic name.
using CalibrationMap = std::map<std::string, ScoreStats>;

// (s - mean) / stddev; stddev must be positive.
double zscore(double s, const ScoreStats& stats);

struct Candidate {
  std::uint32_t record_index = 0;
  double score = 0.0;  // fused z-score sum
};

struct SearchResult {
  // Sorted by (score desc, subject_id asc).
  std::vector<Candidate> ranked;
  std::uint64_t comparisons = 0;
  std::uint32_t bins_visited = 0;
};

// Bin-limited search with 1 <= t <= 2^k.  Candidate scores are the sum of
// per-characteristic z-scores taken in characteristic-name order, so the
// result is invariant under permutations of the characteristic list.
SearchResult search(const std::vector<ProtectedTemplate>& probe,
                    const BinTable& table, std::size_t t,
                    const CalibrationMap& calibration,
                    const SearchOptions& opts = {});

// Scores every enrolled record; comparisons = N * m.
SearchResult exhaustive_search(const std::vector<ProtectedTemplate>& probe,
                               const BinTable& table,
                               const CalibrationMap& calibration);

}  // namespace fbpindex

#endif  // FBPINDEX_RETRIEVE_HPP_
