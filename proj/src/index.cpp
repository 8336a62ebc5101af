// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "fbpindex/index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "fbpindex/ioutil.hpp"

namespace fbpindex {

namespace {

void require_equal_lengths(const EnrolRecord& rec) {
  const std::size_t n0 = rec.templates.front().bits.size();
  for (const auto& t : rec.templates) {
    if (t.bits.size() != n0)
      throw DimensionError(
          "this fusion strategy requires equal template lengths, got " +
          std::to_string(n0) + " and " + std::to_string(t.bits.size()));
  }
}

nlohmann::ordered_json template_to_json(const ProtectedTemplate& t) {
  nlohmann::ordered_json j;
  j["scheme"] = scheme_name(t.scheme);
  j["n"] = t.bits.size();
  j["bits"] = t.bits.to_hex();
  if (t.scheme == Scheme::kIomGrp) {
    j["q"] = t.iom_projections;
    j["ints"] = t.ints;
  }
  return j;
}

ProtectedTemplate template_from_json(const nlohmann::json& j) {
  ProtectedTemplate t;
  t.scheme = scheme_from_name(j.at("scheme").get<std::string>());
  const auto n = j.at("n").get<std::size_t>();
  t.bits = BinaryTemplate::from_hex(j.at("bits").get<std::string>(), n);
  if (t.scheme == Scheme::kIomGrp) {
    t.iom_projections = j.at("q").get<std::uint32_t>();
    t.ints = j.at("ints").get<std::vector<std::uint16_t>>();
    if (iom_encode(t.ints, t.iom_projections) != t.bits)
      throw ParseError("stored bits do not match the stored integers");
  }
  return t;
}

}  // namespace

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kFeatureConcat:
      return "feature_concat";
    case Strategy::kRankedCodes:
      return "ranked_codes";
    case Strategy::kXorCodes:
      return "xor_codes";
  }
  throw ArgumentError("unknown strategy");
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "feature_concat") return Strategy::kFeatureConcat;
  if (name == "ranked_codes") return Strategy::kRankedCodes;
  if (name == "xor_codes") return Strategy::kXorCodes;
  throw ConfigError("unknown strategy '" + name + "'");
}

Pattern assign_bin(const EnrolRecord& rec, Strategy strategy, int k) {
  if (rec.templates.empty())
    throw ArgumentError("record has no templates");
  switch (strategy) {
    case Strategy::kFeatureConcat: {
      std::vector<BinaryTemplate> parts;
      parts.reserve(rec.templates.size());
      for (const auto& t : rec.templates) parts.push_back(t.bits);
      return top_pattern(extract_patterns(concat(parts), k));
    }
    case Strategy::kRankedCodes: {
      require_equal_lengths(rec);
      // The best pattern of the merged lists is the best among the
      // per-characteristic winners, so only the tops are examined.
      bool have = false;
      PatternCount best;
      for (const auto& t : rec.templates) {
        const PatternList pl = extract_patterns(t.bits, k);
        const PatternCount& c = pl.entries.front();
        const bool wins = !have || c.count > best.count ||
                          (c.count == best.count &&
                           c.pattern.value < best.pattern.value);
        if (wins) {
          best = c;
          have = true;
        }
      }
      return best.pattern;
    }
    case Strategy::kXorCodes: {
      require_equal_lengths(rec);
      Pattern acc = top_pattern(extract_patterns(rec.templates[0].bits, k));
      for (std::size_t i = 1; i < rec.templates.size(); ++i) {
        acc = xor_patterns(
            acc, top_pattern(extract_patterns(rec.templates[i].bits, k)));
      }
      return acc;
    }
  }
  throw ArgumentError("unknown strategy");
}

BinTable BinTable::build(std::vector<EnrolRecord> records, Strategy strategy,
                         int k, std::vector<std::string> characteristic_order,
                         Exec exec) {
  if (records.empty()) throw ArgumentError("cannot build an empty table");
  if (characteristic_order.empty())
    throw ArgumentError("characteristic order must be non-empty");
  const std::size_t m = characteristic_order.size();
  {
    std::unordered_set<std::string> names(characteristic_order.begin(),
                                          characteristic_order.end());
    if (names.size() != m)
      throw ArgumentError("characteristic order contains duplicates");
  }

  std::unordered_set<std::string> subjects;
  subjects.reserve(records.size());
  for (const auto& rec : records) {
    if (!subjects.insert(rec.subject_id).second)
      throw EnrollmentError("subject '" + rec.subject_id +
                            "' enrolled twice");
    if (rec.templates.size() != m)
      throw DimensionError("subject '" + rec.subject_id + "' carries " +
                           std::to_string(rec.templates.size()) +
                           " templates, expected " + std::to_string(m));
  }
  const auto& first = records.front();
  for (std::size_t c = 0; c < m; ++c) {
    for (const auto& rec : records) {
      if (rec.templates[c].scheme != first.templates[c].scheme ||
          rec.templates[c].bits.size() != first.templates[c].bits.size())
        throw DimensionError("templates of characteristic '" +
                             characteristic_order[c] +
                             "' disagree in scheme or length");
    }
  }

  BinTable t;
  t.strategy_ = strategy;
  t.k_ = k;
  t.characteristic_order_ = std::move(characteristic_order);
  t.records_ = std::move(records);
  t.assigned_.resize(t.records_.size());
  par::for_each_index(t.records_.size(), exec, [&](std::size_t i) {
    t.assigned_[i] = assign_bin(t.records_[i], strategy, k).value;
  });
  t.link_bins();
  return t;
}

void BinTable::link_bins() {
  bins_.clear();
  for (std::size_t i = 0; i < records_.size(); ++i)
    bins_[assigned_[i]].push_back(static_cast<std::uint32_t>(i));
}

const std::vector<std::uint32_t>* BinTable::bin(const Pattern& p) const {
  if (p.k != k_)
    throw ArgumentError("pattern length " + std::to_string(p.k) +
                        " does not match table k=" + std::to_string(k_));
  const auto it = bins_.find(p.value);
  return it == bins_.end() ? nullptr : &it->second;
}

BinTable::OccupancyStats BinTable::occupancy_stats() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(bins_.size());
  for (const auto& [value, members] : bins_) keys.push_back(value);
  std::sort(keys.begin(), keys.end());

  OccupancyStats st;
  st.sizes.reserve(keys.size());
  double sum = 0.0;
  for (const auto key : keys) {
    const auto sz = static_cast<std::uint32_t>(bins_.at(key).size());
    st.sizes.push_back(sz);
    sum += sz;
    st.max = std::max(st.max, sz);
  }
  if (!st.sizes.empty()) {
    st.mean = sum / static_cast<double>(st.sizes.size());
    double var = 0.0;
    for (const auto sz : st.sizes) {
      const double d = sz - st.mean;
      var += d * d;
    }
    st.stddev = std::sqrt(var / static_cast<double>(st.sizes.size()));
  }
  return st;
}

nlohmann::ordered_json BinTable::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "fbpindex.bintable";
  j["version"] = 1;
  j["strategy"] = strategy_name(strategy_);
  j["k"] = k_;
  j["characteristics"] = characteristic_order_;
  auto subjects = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < records_.size(); ++i) {
    nlohmann::ordered_json s;
    s["id"] = records_[i].subject_id;
    s["bin"] = assigned_[i];
    auto templates = nlohmann::ordered_json::array();
    for (const auto& t : records_[i].templates)
      templates.push_back(template_to_json(t));
    s["templates"] = std::move(templates);
    subjects.push_back(std::move(s));
  }
  j["subjects"] = std::move(subjects);
  return j;
}

BinTable BinTable::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "fbpindex.bintable")
      throw ParseError("not a bin table file");
    if (j.at("version").get<int>() != 1)
      throw ParseError("unsupported bin table version");
    BinTable t;
    t.strategy_ = strategy_from_name(j.at("strategy").get<std::string>());
    t.k_ = j.at("k").get<int>();
    if (t.k_ < 1 || t.k_ > kMaxPatternBits)
      throw ParseError("stored k out of range");
    t.characteristic_order_ =
        j.at("characteristics").get<std::vector<std::string>>();
    for (const auto& s : j.at("subjects")) {
      EnrolRecord rec;
      rec.subject_id = s.at("id").get<std::string>();
      for (const auto& tj : s.at("templates"))
        rec.templates.push_back(template_from_json(tj));
      const auto bin = s.at("bin").get<std::uint64_t>();
      if (bin >> t.k_) throw ParseError("stored bin value out of range");
      t.records_.push_back(std::move(rec));
      t.assigned_.push_back(bin);
    }
    if (t.records_.empty()) throw ParseError("bin table has no subjects");
    t.link_bins();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad bin table: ") + e.what());
  }
}

void BinTable::save(const std::string& path) const {
  io::atomic_write_file(path, to_json().dump(2) + "\n");
}

BinTable BinTable::load(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("cannot parse '" + path + "': " + e.what());
  }
  return from_json(j);
}

bool BinTable::operator==(const BinTable& o) const {
  return strategy_ == o.strategy_ && k_ == o.k_ &&
         characteristic_order_ == o.characteristic_order_ &&
         records_ == o.records_ && assigned_ == o.assigned_;
}

}  // namespace fbpindex
