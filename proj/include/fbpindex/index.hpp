// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Pattern-indexed enrolment table.
//
// Every enrolled subject lands in exactly one bin, keyed by a k-bit pattern
// derived from its protected templates under one of three fusion strategies:
//   feature_concat  top pattern of the concatenated templates
//   ranked_codes    best (count desc, value asc) pattern over all
//                   per-characteristic pattern lists
//   xor_codes       XOR of the per-characteristic top patterns

#ifndef FBPINDEX_INDEX_HPP_
#define FBPINDEX_INDEX_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "fbpindex/fbp.hpp"
#include "fbpindex/parallel.hpp"
#include "fbpindex/protect.hpp"

namespace fbpindex {

enum class Strategy { kFeatureConcat, kRankedCodes, kXorCodes };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct EnrolRecord {
  std::string subject_id;
  // One template per characteristic, in table order.
  std::vector<ProtectedTemplate> templates;

  bool operator==(const EnrolRecord& o) const = default;
};

// Bin key for one record.  ranked_codes and xor_codes require equal template
// lengths across characteristics; feature_concat does not.
Pattern assign_bin(const EnrolRecord& rec, Strategy strategy, int k);

class BinTable {
 public:
  // Validates records (unique subjects, uniform schemes and lengths per
  // characteristic position), assigns bins and builds the lookup.
  static BinTable build(std::vector<EnrolRecord> records, Strategy strategy,
                        int k, std::vector<std::string> characteristic_order,
                        Exec exec = Exec::kParallel);

  Strategy strategy() const { return strategy_; }
  int k() const { return k_; }
  const std::vector<std::string>& characteristic_order() const {
    return characteristic_order_;
  }

  std::size_t size() const { return records_.size(); }
  std::size_t bin_count() const { return bins_.size(); }
  const EnrolRecord& record(std::size_t i) const { return records_[i]; }
  const std::vector<EnrolRecord>& store() const { return records_; }
  Pattern assigned_pattern(std::size_t i) const {
    return Pattern{assigned_[i], k_};
  }

  // Record indices in one bin, enrolment order; nullptr for an empty bin.
  const std::vector<std::uint32_t>* bin(const Pattern& p) const;

  struct OccupancyStats {
    // Sizes of the non-empty bins in ascending pattern-value order.
    std::vector<std::uint32_t> sizes;
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::uint32_t max = 0;
  };
  OccupancyStats occupancy_stats() const;

  nlohmann::ordered_json to_json() const;
  static BinTable from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static BinTable load(const std::string& path);

  bool operator==(const BinTable& o) const;

 private:
  BinTable() = default;
  void link_bins();

  Strategy strategy_ = Strategy::kFeatureConcat;
  int k_ = 0;
  std::vector<std::string> characteristic_order_;
  std::vector<EnrolRecord> records_;
  std::vector<std::uint64_t> assigned_;  // bin value per record
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> bins_;
};

}  // namespace fbpindex

#endif  // FBPINDEX_INDEX_HPP_
