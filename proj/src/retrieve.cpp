// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "fbpindex/retrieve.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace fbpindex {

namespace {

void require_equal_probe_lengths(const std::vector<ProtectedTemplate>& probe) {
  const std::size_t n0 = probe.front().bits.size();
  for (const auto& t : probe) {
    if (t.bits.size() != n0)
      throw DimensionError(
          "this fusion strategy requires equal template lengths, got " +
          std::to_string(n0) + " and " + std::to_string(t.bits.size()));
  }
}

// Depth-first enumeration of one rank-sum level of the tuple lattice.
// Bounds are pruned so only tuples that can still reach the target sum are
// expanded; in counting mode (out == nullptr) the walk aborts once the count
// passes the remaining budget.
struct LevelWalker {
  const std::vector<PatternList>& lists;
  std::vector<std::size_t> suffix_max;  // max achievable rank sum from slot j
  std::uint64_t budget_left = 0;
  std::uint64_t count = 0;
  bool over = false;
  std::vector<std::uint64_t>* out = nullptr;

  explicit LevelWalker(const std::vector<PatternList>& l) : lists(l) {
    suffix_max.assign(lists.size() + 1, 0);
    for (std::size_t j = lists.size(); j-- > 0;)
      suffix_max[j] = suffix_max[j + 1] + lists[j].entries.size() - 1;
  }

  void walk(std::size_t j, std::size_t remaining, std::uint64_t acc) {
    if (over) return;
    if (j == lists.size()) {
      if (out) {
        out->push_back(acc);
      } else if (++count > budget_left) {
        over = true;
      }
      return;
    }
    const std::size_t hi =
        std::min(lists[j].entries.size() - 1, remaining);
    const std::size_t lo =
        remaining > suffix_max[j + 1] ? remaining - suffix_max[j + 1] : 0;
    for (std::size_t r = lo; r <= hi && !over; ++r) {
      walk(j + 1, remaining - r,
           acc ^ lists[j].entries[r].pattern.value);
    }
  }
};

std::vector<Pattern> xor_sequence(const std::vector<PatternList>& lists,
                                  int k) {
  const std::size_t m = lists.size();
  const std::uint64_t cap = std::uint64_t{1} << k;
  const std::uint64_t budget = m * cap;

  std::size_t max_sum = 0;
  for (const auto& pl : lists) max_sum += pl.entries.size() - 1;

  std::vector<bool> seen(cap, false);
  std::vector<Pattern> seq;
  std::vector<std::uint64_t> level_values;
  std::uint64_t evaluated = 0;

  for (std::size_t s = 0; s <= max_sum && seq.size() < cap; ++s) {
    LevelWalker counter(lists);
    counter.budget_left = budget - evaluated;
    counter.walk(0, s, 0);
    if (counter.over) break;  // the whole level must fit the budget
    evaluated += counter.count;

    level_values.clear();
    LevelWalker collector(lists);
    collector.out = &level_values;
    collector.walk(0, s, 0);
    std::sort(level_values.begin(), level_values.end());
    for (const auto v : level_values) {
      if (!seen[v]) {
        seen[v] = true;
        seq.push_back(Pattern{v, k});
        if (seq.size() == cap) break;
      }
    }
  }
  return seq;
}

}  // namespace

std::vector<Pattern> probe_sequence(
    const std::vector<ProtectedTemplate>& probe, Strategy strategy, int k) {
  if (probe.empty()) throw ArgumentError("probe has no templates");
  switch (strategy) {
    case Strategy::kFeatureConcat: {
      std::vector<BinaryTemplate> parts;
      parts.reserve(probe.size());
      for (const auto& t : probe) parts.push_back(t.bits);
      const PatternList pl = extract_patterns(concat(parts), k);
      std::vector<Pattern> seq;
      seq.reserve(pl.entries.size());
      for (const auto& e : pl.entries) seq.push_back(e.pattern);
      return seq;
    }
    case Strategy::kRankedCodes: {
      require_equal_probe_lengths(probe);
      std::unordered_map<std::uint64_t, std::uint32_t> best;
      for (const auto& t : probe) {
        const PatternList pl = extract_patterns(t.bits, k);
        for (const auto& e : pl.entries) {
          auto [it, fresh] = best.emplace(e.pattern.value, e.count);
          if (!fresh && e.count > it->second) it->second = e.count;
        }
      }
      std::vector<PatternCount> merged;
      merged.reserve(best.size());
      for (const auto& [value, count] : best)
        merged.push_back(PatternCount{Pattern{value, k}, count});
      std::sort(merged.begin(), merged.end(),
                [](const PatternCount& a, const PatternCount& b) {
                  if (a.count != b.count) return a.count > b.count;
                  return a.pattern.value < b.pattern.value;
                });
      std::vector<Pattern> seq;
      seq.reserve(merged.size());
      for (const auto& e : merged) seq.push_back(e.pattern);
      return seq;
    }
    case Strategy::kXorCodes: {
      require_equal_probe_lengths(probe);
      std::vector<PatternList> lists;
      lists.reserve(probe.size());
      for (const auto& t : probe) lists.push_back(extract_patterns(t.bits, k));
      return xor_sequence(lists, k);
    }
  }
  throw ArgumentError("unknown strategy");
}

std::vector<VisitStep> walk_bins(const std::vector<Pattern>& sequence,
                                 const BinTable& table, std::size_t t,
                                 const SearchOptions& opts) {
  std::vector<VisitStep> steps;
  std::size_t used = 0;
  for (const auto& p : sequence) {
    if (used >= t) break;
    const auto* members = table.bin(p);
    if (members) {
      steps.push_back(
          VisitStep{p, static_cast<std::uint32_t>(members->size())});
      ++used;
    } else if (opts.empty_bins_consume_budget) {
      steps.push_back(VisitStep{p, 0});
      ++used;
    }
  }
  return steps;
}

double zscore(double s, const ScoreStats& stats) {
  if (!(stats.stddev > 0.0))
    throw ConfigError("z-score normalization requires a positive stddev");
  return (s - stats.mean) / stats.stddev;
}

namespace {

// Validation and scoring shared by both search flavours.
struct Scorer {
  const BinTable& table;
  const std::vector<ProtectedTemplate>& probe;
  std::vector<const ScoreStats*> stats;    // per characteristic position
  std::vector<std::size_t> canonical;      // positions in name order

  Scorer(const std::vector<ProtectedTemplate>& probe_in, const BinTable& t,
         const CalibrationMap& calibration)
      : table(t), probe(probe_in) {
    const auto& order = table.characteristic_order();
    if (probe.size() != order.size())
      throw DimensionError("probe carries " + std::to_string(probe.size()) +
                           " templates, the table expects " +
                           std::to_string(order.size()));
    const auto& ref = table.record(0).templates;
    for (std::size_t c = 0; c < order.size(); ++c) {
      if (probe[c].scheme != ref[c].scheme ||
          probe[c].bits.size() != ref[c].bits.size())
        throw DimensionError("probe template for characteristic '" +
                             order[c] +
                             "' disagrees with the table in scheme or length");
      const auto it = calibration.find(order[c]);
      if (it == calibration.end())
        throw ConfigError("missing calibration for characteristic '" +
                          order[c] + "'");
      if (!(it->second.stddev > 0.0))
        throw ConfigError("calibration stddev for characteristic '" +
                          order[c] + "' must be positive");
      stats.push_back(&it->second);
    }
    canonical.resize(order.size());
    std::iota(canonical.begin(), canonical.end(), std::size_t{0});
    std::sort(canonical.begin(), canonical.end(),
              [&order](std::size_t a, std::size_t b) {
                return order[a] < order[b];
              });
  }

  double fused(std::uint32_t record_index) const {
    const auto& rec = table.record(record_index);
    double sum = 0.0;
    for (const std::size_t c : canonical)
      sum += zscore(similarity(probe[c], rec.templates[c]), *stats[c]);
    return sum;
  }

  void rank(std::vector<Candidate>& cands) const {
    std::sort(cands.begin(), cands.end(),
              [this](const Candidate& a, const Candidate& b) {
                if (a.score != b.score) return a.score > b.score;
                return table.record(a.record_index).subject_id <
                       table.record(b.record_index).subject_id;
              });
  }
};

}  // namespace

SearchResult search(const std::vector<ProtectedTemplate>& probe,
                    const BinTable& table, std::size_t t,
                    const CalibrationMap& calibration,
                    const SearchOptions& opts) {
  const std::uint64_t cap = std::uint64_t{1} << table.k();
  if (t < 1 || t > cap)
    throw ArgumentError("t must be in [1, " + std::to_string(cap) +
                        "], got " + std::to_string(t));
  const Scorer scorer(probe, table, calibration);

  const auto seq = probe_sequence(probe, table.strategy(), table.k());
  const auto steps = walk_bins(seq, table, t, opts);

  SearchResult res;
  res.bins_visited = static_cast<std::uint32_t>(steps.size());
  std::uint64_t pool = 0;
  for (const auto& st : steps) pool += st.occupancy;
  res.comparisons = pool * probe.size();

  res.ranked.reserve(pool);
  for (const auto& st : steps) {
    if (st.occupancy == 0) continue;
    for (const auto idx : *table.bin(st.pattern))
      res.ranked.push_back(Candidate{idx, scorer.fused(idx)});
  }
  scorer.rank(res.ranked);
  return res;
}

SearchResult exhaustive_search(const std::vector<ProtectedTemplate>& probe,
                               const BinTable& table,
                               const CalibrationMap& calibration) {
  const Scorer scorer(probe, table, calibration);
  SearchResult res;
  res.comparisons =
      static_cast<std::uint64_t>(table.size()) * probe.size();
  res.bins_visited = 0;
  res.ranked.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto idx = static_cast<std::uint32_t>(i);
    res.ranked.push_back(Candidate{idx, scorer.fused(idx)});
  }
  scorer.rank(res.ranked);
  return res;
}

}  // namespace fbpindex
