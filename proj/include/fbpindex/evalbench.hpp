// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Workload and accuracy evaluation.
//
// Identities are split once into a calibration pool and an experiment pool;
// the experiment pool is evaluated with F-fold cross-validation, each fold
// enrolling the identities outside its chunk.  Per (fold, identity,
// characteristic) one enrolment and one probe sample are drawn from seeded
// streams keyed by the characteristic name and the identity's global index,
// so the draw is identical across strategies, schemes and k.
//
// The bench processes characteristics in name order no matter how the
// configuration lists them; reports are therefore bit-identical under
// permutations of the characteristic list.
//
// Workload numbers are fractions of the exhaustive baseline N * m:
//   closed  W_l = mean(comparisons) / (N * m)
//           W_u = (mean + std)(comparisons) / (N * m)
//   open    W   = mean(comparisons) / (N * m)
// aggregated as the plain mean over folds.

#ifndef FBPINDEX_EVALBENCH_HPP_
#define FBPINDEX_EVALBENCH_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fbpindex/datagen.hpp"
#include "fbpindex/retrieve.hpp"

namespace fbpindex {

struct Protocol {
  int folds = 10;
  std::size_t calibration_identities = 50;
  double open_set_split = 0.2;  // fraction of a fold pool held out
  std::uint64_t seed = 1;

  bool operator==(const Protocol& o) const = default;
};

struct TPolicy {
  enum class Kind { kFixed, kClosedSetDerived };
  Kind kind = Kind::kClosedSetDerived;
  std::size_t value = 0;  // kFixed only

  static TPolicy fixed(std::size_t t) { return {Kind::kFixed, t}; }
  static TPolicy derived() { return {Kind::kClosedSetDerived, 0}; }

  bool operator==(const TPolicy& o) const = default;
};

struct FoldMetrics {
  int fold = 0;
  std::size_t enrolled = 0;
  std::size_t probes = 0;  // mated + non-mated searches
  double hit_rate = 0.0;   // closed scenario only
  double mean_comparisons = 0.0;
  double std_comparisons = 0.0;  // population
  double mean_bins = 0.0;
  double std_bins = 0.0;  // population
  double w_l = 0.0;
  double w_u = 0.0;
  double w_open = 0.0;
};

struct DetPoint {
  double threshold = 0.0;
  double fpir = 0.0;
  double fnir = 0.0;
};

struct EvalReport {
  std::string scenario;  // "closed" | "open"
  std::string strategy;  // strategy name or "exhaustive"
  std::string schemes;   // uniform scheme name, or per-characteristic list
  std::vector<std::string> characteristics;  // canonical (name) order
  int k = 0;
  std::size_t t = 0;  // open scenario: bin visit budget; 0 = unlimited
  int folds = 0;
  std::size_t identities = 0;  // experiment pool size

  // Aggregates: mean of the per-fold values.
  double hit_rate = 0.0;
  double mean_comparisons = 0.0;
  double std_comparisons = 0.0;
  double mean_bins = 0.0;
  double std_bins = 0.0;
  double w_l = 0.0;
  double w_u = 0.0;
  double w_open = 0.0;
  // Fractions in [0, 1]; negative when not applicable.
  double fnir_at_fpir_1pct = -1.0;
  double fnir_at_fpir_10pct = -1.0;

  std::vector<FoldMetrics> fold_metrics;
  std::vector<DetPoint> det;  // pooled over folds, threshold ascending

  // Raw per-fold logs, one entry per search in probe order (mated first,
  // then non-mated).  Kept in memory for verification; not serialized.
  std::vector<std::vector<std::uint64_t>> comparison_logs;
  std::vector<std::vector<std::uint32_t>> bin_logs;
};

// Pooled detection curve.  absent counts are searches that produced no
// score at all; they miss at every threshold (mated) or can never raise a
// false positive (non-mated).
std::vector<DetPoint> det_curve(const std::vector<double>& mated,
                                std::size_t mated_absent,
                                const std::vector<double>& nonmated,
                                std::size_t nonmated_absent);

// Z-score calibration statistics from a seeded identity subset that the
// experiment folds never touch: mated pairs within each calibration
// identity, non-mated pairs across them, one combined mean/std per
// characteristic.  Bench uses exactly this function, so standalone searches
// calibrated here score identically to bench searches.
CalibrationMap calibrate(const EmbeddingDataset& ds,
                         const std::vector<std::string>& characteristics,
                         const std::map<std::string, SchemeConfig>& schemes,
                         const Protocol& protocol, Exec exec = Exec::kParallel);

// FNIR at the given FPIR, linearly interpolated between the two bracketing
// operating points.
double fnir_at_fpir(const std::vector<DetPoint>& det, double target_fpir);

class Bench {
 public:
  // Validates the dataset, protects every sample of the requested
  // characteristics and computes the calibration statistics.
  Bench(const EmbeddingDataset& ds, std::vector<std::string> characteristics,
        std::map<std::string, SchemeConfig> schemes, Protocol protocol,
        SearchOptions search_opts = {}, Exec exec = Exec::kParallel);

  const std::vector<std::string>& characteristics() const { return chars_; }
  const CalibrationMap& calibration() const { return calibration_; }
  std::size_t experiment_identities() const { return experiment_.size(); }

  // Closed-set identification: every probe is enrolled; the search walks the
  // whole probe sequence and the comparisons up to and including the mate's
  // bin are charged (the full walk on a miss).  Results are cached per
  // (strategy, k).
  const EvalReport& closed_set(Strategy strategy, int k);
  EvalReport closed_set_exhaustive();

  // Bin visit budget derived from the closed-set run: round(mean + std) of
  // visited bins, clamped to [1, 2^k].
  std::size_t resolve_t(Strategy strategy, int k);

  // Open-set identification over the same folds; a seeded share of each fold
  // pool is held out as non-mated probes.
  EvalReport open_set(Strategy strategy, int k, const TPolicy& t_policy);
  EvalReport open_set_exhaustive();

  std::vector<EvalReport> k_sweep(Strategy strategy,
                                  const std::vector<int>& ks);

 private:
  std::vector<std::size_t> fold_pool(int fold) const;
  void split_fold_pool(int fold, std::vector<std::size_t>& enrolled,
                       std::vector<std::size_t>& nonmated) const;
  std::pair<std::size_t, std::size_t> pick_samples(int fold, std::size_t id,
                                                   std::size_t c) const;
  std::vector<ProtectedTemplate> templates_of(std::size_t id, int fold,
                                              bool enrol) const;
  BinTable build_table(const std::vector<std::size_t>& enrolled, int fold,
                       Strategy strategy, int k) const;
  std::string scheme_label() const;
  EvalReport base_report(const std::string& scenario,
                         const std::string& strategy, int k) const;

  std::vector<std::string> chars_;  // canonical order
  std::vector<std::size_t> dims_;
  std::map<std::string, SchemeConfig> schemes_;
  Protocol protocol_;
  SearchOptions search_opts_;
  Exec exec_;

  std::vector<std::string> subjects_;  // dataset order, global index
  // [characteristic][identity][sample slot]; slots ordered by sample_id.
  std::vector<std::vector<std::vector<ProtectedTemplate>>> protected_;

  std::vector<std::size_t> calib_;       // global indices, ascending
  std::vector<std::size_t> experiment_;  // global indices, ascending
  std::vector<std::vector<std::size_t>> chunks_;  // per fold, ascending

  CalibrationMap calibration_;

  std::map<std::pair<int, int>, EvalReport> closed_cache_;
};

}  // namespace fbpindex

#endif  // FBPINDEX_EVALBENCH_HPP_
