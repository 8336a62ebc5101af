// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "fbpindex/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "fbpindex/rng.hpp"

namespace fbpindex {

namespace {

constexpr std::uint64_t kCalibTag = rng::fnv1a64("protocol.calibration");
constexpr std::uint64_t kFoldTag = rng::fnv1a64("protocol.folds");
constexpr std::uint64_t kSampleTag = rng::fnv1a64("protocol.samples");
constexpr std::uint64_t kOpenTag = rng::fnv1a64("protocol.open_split");

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double pop_std_of(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (const double x : v) {
    const double d = x - mean;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng::Xoshiro256ss g(seed);
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = g.next() % (i + 1);
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

void require_k(int k) {
  if (k < 1 || k > kMaxPatternBits)
    throw ArgumentError("k must be in [1, " + std::to_string(kMaxPatternBits) +
                        "], got " + std::to_string(k));
}

struct ScorePool {
  std::vector<double> mated;
  std::size_t mated_absent = 0;
  std::vector<double> nonmated;
  std::size_t nonmated_absent = 0;
};

}  // namespace

std::vector<DetPoint> det_curve(const std::vector<double>& mated,
                                std::size_t mated_absent,
                                const std::vector<double>& nonmated,
                                std::size_t nonmated_absent) {
  const std::size_t n_mated = mated.size() + mated_absent;
  const std::size_t n_nonmated = nonmated.size() + nonmated_absent;
  if (n_mated == 0 || n_nonmated == 0)
    throw ProtocolError("a detection curve needs mated and non-mated trials");

  std::vector<double> sm(mated);
  std::vector<double> sn(nonmated);
  std::sort(sm.begin(), sm.end());
  std::sort(sn.begin(), sn.end());

  std::vector<double> thresholds;
  thresholds.reserve(sm.size() + sn.size() + 2);
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  thresholds.insert(thresholds.end(), sm.begin(), sm.end());
  thresholds.insert(thresholds.end(), sn.begin(), sn.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  std::vector<DetPoint> det;
  det.reserve(thresholds.size());
  for (const double tau : thresholds) {
    // A probe is accepted at tau when its score is >= tau.
    const auto missed = static_cast<std::size_t>(
        std::lower_bound(sm.begin(), sm.end(), tau) - sm.begin());
    const auto raised = static_cast<std::size_t>(
        sn.end() - std::lower_bound(sn.begin(), sn.end(), tau));
    DetPoint p;
    p.threshold = tau;
    p.fnir = static_cast<double>(missed + mated_absent) /
             static_cast<double>(n_mated);
    p.fpir = static_cast<double>(raised) / static_cast<double>(n_nonmated);
    det.push_back(p);
  }
  return det;
}

double fnir_at_fpir(const std::vector<DetPoint>& det, double target_fpir) {
  if (det.empty()) throw ArgumentError("empty detection curve");
  if (!(target_fpir > 0.0) || !(target_fpir < 1.0))
    throw ArgumentError("target FPIR must be inside (0, 1)");

  // Best (lowest) FNIR per distinct FPIR, then the curve in FPIR order.
  std::map<double, double> best;
  for (const auto& p : det) {
    const auto [it, fresh] = best.emplace(p.fpir, p.fnir);
    if (!fresh && p.fnir < it->second) it->second = p.fnir;
  }
  const auto hi = best.lower_bound(target_fpir);
  if (hi != best.end() && hi->first == target_fpir) return hi->second;
  if (hi == best.end()) return best.rbegin()->second;  // target unreachable
  if (hi == best.begin()) return hi->second;
  const auto lo = std::prev(hi);
  const double span = hi->first - lo->first;
  const double w = (target_fpir - lo->first) / span;
  return lo->second + w * (hi->second - lo->second);
}

Bench::Bench(const EmbeddingDataset& ds,
             std::vector<std::string> characteristics,
             std::map<std::string, SchemeConfig> schemes, Protocol protocol,
             SearchOptions search_opts, Exec exec)
    : schemes_(std::move(schemes)),
      protocol_(protocol),
      search_opts_(search_opts),
      exec_(exec) {
  if (protocol.folds < 2)
    throw ConfigError("the protocol needs at least two folds");
  if (protocol.calibration_identities < 2)
    throw ConfigError("the protocol needs at least two calibration identities");
  if (!(protocol.open_set_split > 0.0) || !(protocol.open_set_split < 1.0))
    throw ConfigError("open_set_split must be inside (0, 1)");
  if (characteristics.empty())
    throw ConfigError("at least one characteristic is required");

  validate(ds);

  chars_ = std::move(characteristics);
  std::sort(chars_.begin(), chars_.end());
  if (std::adjacent_find(chars_.begin(), chars_.end()) != chars_.end())
    throw ConfigError("duplicate characteristic in the configuration");

  std::unordered_map<std::string, std::size_t> ds_dims;
  for (const auto& [name, dim] : ds.characteristics()) ds_dims[name] = dim;
  for (const auto& c : chars_) {
    if (!schemes_.count(c))
      throw ConfigError("no scheme configured for characteristic '" + c + "'");
    const auto it = ds_dims.find(c);
    if (it == ds_dims.end())
      throw ProtocolError("characteristic '" + c +
                          "' is not present in the dataset");
    dims_.push_back(it->second);
  }

  subjects_ = ds.subjects();
  const std::size_t n = subjects_.size();
  std::unordered_map<std::string, std::size_t> subj_idx;
  subj_idx.reserve(n);
  for (std::size_t i = 0; i < n; ++i) subj_idx[subjects_[i]] = i;

  const std::size_t m = chars_.size();
  std::unordered_map<std::string, std::size_t> char_idx;
  for (std::size_t c = 0; c < m; ++c) char_idx[chars_[c]] = c;

  // (sample_id, record index) per identity and characteristic.
  std::vector<std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>>>
      grouped(m, std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>>(n));
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    const auto& rec = ds.records[r];
    const auto cit = char_idx.find(rec.characteristic);
    if (cit == char_idx.end()) continue;
    grouped[cit->second][subj_idx.at(rec.subject_id)].emplace_back(
        rec.sample_id, r);
  }

  protected_.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    const Protector protector(schemes_.at(chars_[c]), dims_[c]);
    std::vector<Embedding> flat;
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t id = 0; id < n; ++id) {
      auto& samples = grouped[c][id];
      std::sort(samples.begin(), samples.end());
      for (std::size_t s = 0; s < samples.size(); ++s) {
        flat.push_back(ds.records[samples[s].second].values);
        slots.emplace_back(id, s);
      }
    }
    auto batch = protect_batch(flat, protector, exec_);
    protected_[c].resize(n);
    for (std::size_t id = 0; id < n; ++id)
      protected_[c][id].resize(grouped[c][id].size());
    for (std::size_t i = 0; i < batch.size(); ++i)
      protected_[c][slots[i].first][slots[i].second] = std::move(batch[i]);
  }

  // Calibration / experiment split, then fold chunks over the experiment
  // pool.  All index sets are kept in ascending global order.
  if (n <= protocol_.calibration_identities)
    throw ProtocolError("dataset has " + std::to_string(n) +
                        " identities, calibration alone needs more");
  const auto perm = shuffled_indices(n, rng::derive(protocol_.seed, kCalibTag));
  calib_.assign(perm.begin(),
                perm.begin() + static_cast<std::ptrdiff_t>(
                                   protocol_.calibration_identities));
  experiment_.assign(
      perm.begin() +
          static_cast<std::ptrdiff_t>(protocol_.calibration_identities),
      perm.end());
  std::sort(calib_.begin(), calib_.end());
  std::sort(experiment_.begin(), experiment_.end());

  const std::size_t e = experiment_.size();
  const auto folds = static_cast<std::size_t>(protocol_.folds);
  if (e < folds)
    throw ProtocolError("experiment pool of " + std::to_string(e) +
                        " identities cannot be split into " +
                        std::to_string(folds) + " folds");
  const auto fperm = shuffled_indices(e, rng::derive(protocol_.seed, kFoldTag));
  chunks_.resize(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t lo = f * e / folds;
    const std::size_t hi = (f + 1) * e / folds;
    for (std::size_t i = lo; i < hi; ++i)
      chunks_[f].push_back(experiment_[fperm[i]]);
    std::sort(chunks_[f].begin(), chunks_[f].end());
    if (e - chunks_[f].size() < 2)
      throw ProtocolError("fold " + std::to_string(f) +
                          " leaves fewer than two enrolled identities");
  }

  calibration_ = calibrate(ds, chars_, schemes_, protocol_, exec_);
}

// Protects only the first two samples of each calibration identity, so the
// statistics are affordable without a full bench.
CalibrationMap calibrate(const EmbeddingDataset& ds,
                         const std::vector<std::string>& characteristics,
                         const std::map<std::string, SchemeConfig>& schemes,
                         const Protocol& protocol, Exec exec) {
  if (protocol.calibration_identities < 2)
    throw ConfigError("the protocol needs at least two calibration identities");
  validate(ds);

  const auto subjects = ds.subjects();
  const std::size_t n = subjects.size();
  if (n <= protocol.calibration_identities)
    throw ProtocolError("dataset has " + std::to_string(n) +
                        " identities, calibration alone needs more");
  const auto perm = shuffled_indices(n, rng::derive(protocol.seed, kCalibTag));
  std::vector<std::size_t> calib(
      perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(
                                       protocol.calibration_identities));
  std::sort(calib.begin(), calib.end());

  std::unordered_map<std::string, std::size_t> calib_pos;
  calib_pos.reserve(calib.size());
  for (std::size_t i = 0; i < calib.size(); ++i)
    calib_pos[subjects[calib[i]]] = i;

  std::unordered_map<std::string, std::size_t> dims;
  for (const auto& [name, dim] : ds.characteristics()) dims[name] = dim;

  CalibrationMap out;
  for (const auto& cname : characteristics) {
    const auto sit = schemes.find(cname);
    if (sit == schemes.end())
      throw ConfigError("no scheme configured for characteristic '" + cname +
                        "'");
    const auto dit = dims.find(cname);
    if (dit == dims.end())
      throw ProtocolError("characteristic '" + cname +
                          "' is not present in the dataset");

    // Two lowest sample ids per calibration identity.
    std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>> samples(
        calib.size());
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
      const auto& rec = ds.records[r];
      if (rec.characteristic != cname) continue;
      const auto pit = calib_pos.find(rec.subject_id);
      if (pit == calib_pos.end()) continue;
      samples[pit->second].emplace_back(rec.sample_id, r);
    }
    std::vector<Embedding> flat;
    flat.reserve(2 * calib.size());
    for (auto& s : samples) {
      std::sort(s.begin(), s.end());
      flat.push_back(ds.records[s[0].second].values);
      flat.push_back(ds.records[s[1].second].values);
    }
    const Protector protector(sit->second, dit->second);
    const auto tpl = protect_batch(flat, protector, exec);

    std::vector<double> scores;
    scores.reserve(calib.size() + calib.size() * (calib.size() - 1) / 2);
    for (std::size_t i = 0; i < calib.size(); ++i)
      scores.push_back(similarity(tpl[2 * i], tpl[2 * i + 1]));
    for (std::size_t a = 0; a < calib.size(); ++a) {
      for (std::size_t b = a + 1; b < calib.size(); ++b)
        scores.push_back(similarity(tpl[2 * a], tpl[2 * b]));
    }
    ScoreStats st;
    st.mean = mean_of(scores);
    st.stddev = pop_std_of(scores, st.mean);
    if (!(st.stddev > 0.0))
      throw ProtocolError("calibration scores for characteristic '" + cname +
                          "' are degenerate");
    out[cname] = st;
  }
  return out;
}

std::vector<std::size_t> Bench::fold_pool(int fold) const {
  std::vector<std::size_t> pool;
  pool.reserve(experiment_.size());
  const auto& chunk = chunks_[static_cast<std::size_t>(fold)];
  std::set_difference(experiment_.begin(), experiment_.end(), chunk.begin(),
                      chunk.end(), std::back_inserter(pool));
  return pool;
}

void Bench::split_fold_pool(int fold, std::vector<std::size_t>& enrolled,
                            std::vector<std::size_t>& nonmated) const {
  const auto pool = fold_pool(fold);
  const auto perm = shuffled_indices(
      pool.size(), rng::derive(protocol_.seed, kOpenTag,
                               static_cast<std::uint64_t>(fold)));
  auto held = static_cast<std::size_t>(
      std::llround(protocol_.open_set_split *
                   static_cast<double>(pool.size())));
  held = std::clamp<std::size_t>(held, 1, pool.size() - 1);

  nonmated.clear();
  enrolled.clear();
  for (std::size_t i = 0; i < held; ++i) nonmated.push_back(pool[perm[i]]);
  for (std::size_t i = held; i < pool.size(); ++i)
    enrolled.push_back(pool[perm[i]]);
  std::sort(nonmated.begin(), nonmated.end());
  std::sort(enrolled.begin(), enrolled.end());
}

std::pair<std::size_t, std::size_t> Bench::pick_samples(int fold,
                                                        std::size_t id,
                                                        std::size_t c) const {
  const std::size_t count = protected_[c][id].size();
  rng::Xoshiro256ss g(rng::derive(protocol_.seed, kSampleTag,
                                  static_cast<std::uint64_t>(fold), id,
                                  rng::fnv1a64(chars_[c])));
  const std::size_t enrol = g.next() % count;
  std::size_t probe = g.next() % (count - 1);
  if (probe >= enrol) ++probe;
  return {enrol, probe};
}

std::vector<ProtectedTemplate> Bench::templates_of(std::size_t id, int fold,
                                                   bool enrol) const {
  std::vector<ProtectedTemplate> out;
  out.reserve(chars_.size());
  for (std::size_t c = 0; c < chars_.size(); ++c) {
    const auto [e, p] = pick_samples(fold, id, c);
    out.push_back(protected_[c][id][enrol ? e : p]);
  }
  return out;
}

BinTable Bench::build_table(const std::vector<std::size_t>& enrolled, int fold,
                            Strategy strategy, int k) const {
  std::vector<EnrolRecord> records(enrolled.size());
  par::for_each_index(enrolled.size(), exec_, [&](std::size_t i) {
    records[i].subject_id = subjects_[enrolled[i]];
    records[i].templates = templates_of(enrolled[i], fold, true);
  });
  return BinTable::build(std::move(records), strategy, k, chars_, exec_);
}

std::string Bench::scheme_label() const {
  bool uniform = true;
  const Scheme first = schemes_.at(chars_.front()).scheme;
  for (const auto& c : chars_)
    uniform = uniform && schemes_.at(c).scheme == first;
  if (uniform) return scheme_name(first);
  std::string label;
  for (const auto& c : chars_) {
    if (!label.empty()) label += '+';
    label += c + ":" + scheme_name(schemes_.at(c).scheme);
  }
  return label;
}

EvalReport Bench::base_report(const std::string& scenario,
                              const std::string& strategy, int k) const {
  EvalReport rep;
  rep.scenario = scenario;
  rep.strategy = strategy;
  rep.schemes = scheme_label();
  rep.characteristics = chars_;
  rep.k = k;
  rep.folds = protocol_.folds;
  rep.identities = experiment_.size();
  return rep;
}

namespace {

void finalize_aggregates(EvalReport& rep) {
  const auto f = static_cast<double>(rep.fold_metrics.size());
  for (const auto& fm : rep.fold_metrics) {
    rep.hit_rate += fm.hit_rate;
    rep.mean_comparisons += fm.mean_comparisons;
    rep.std_comparisons += fm.std_comparisons;
    rep.mean_bins += fm.mean_bins;
    rep.std_bins += fm.std_bins;
    rep.w_l += fm.w_l;
    rep.w_u += fm.w_u;
    rep.w_open += fm.w_open;
  }
  rep.hit_rate /= f;
  rep.mean_comparisons /= f;
  rep.std_comparisons /= f;
  rep.mean_bins /= f;
  rep.std_bins /= f;
  rep.w_l /= f;
  rep.w_u /= f;
  rep.w_open /= f;
}

}  // namespace

const EvalReport& Bench::closed_set(Strategy strategy, int k) {
  require_k(k);
  const auto key = std::make_pair(static_cast<int>(strategy), k);
  if (const auto it = closed_cache_.find(key); it != closed_cache_.end())
    return it->second;

  EvalReport rep = base_report("closed", strategy_name(strategy), k);
  const std::size_t m = chars_.size();

  for (int f = 0; f < protocol_.folds; ++f) {
    const auto pool = fold_pool(f);
    const BinTable table = build_table(pool, f, strategy, k);
    const std::size_t n = pool.size();
    const double baseline = static_cast<double>(n * m);

    std::vector<std::uint64_t> comp(n);
    std::vector<std::uint32_t> bins(n);
    std::vector<unsigned char> hit(n, 0);
    par::for_each_index(n, exec_, [&](std::size_t i) {
      const auto probe = templates_of(pool[i], f, false);
      const auto seq = probe_sequence(probe, strategy, k);
      const auto steps = walk_bins(seq, table, seq.size(), search_opts_);
      const std::uint64_t mate = table.assigned_pattern(i).value;
      std::uint64_t visited_members = 0;
      std::uint32_t visited_bins = 0;
      for (const auto& st : steps) {
        visited_members += st.occupancy;
        ++visited_bins;
        if (st.pattern.value == mate) {
          hit[i] = 1;
          break;
        }
      }
      comp[i] = visited_members * m;
      bins[i] = visited_bins;
    });

    FoldMetrics fm;
    fm.fold = f;
    fm.enrolled = n;
    fm.probes = n;
    std::vector<double> comp_d(comp.begin(), comp.end());
    std::vector<double> bins_d(bins.begin(), bins.end());
    fm.mean_comparisons = mean_of(comp_d);
    fm.std_comparisons = pop_std_of(comp_d, fm.mean_comparisons);
    fm.mean_bins = mean_of(bins_d);
    fm.std_bins = pop_std_of(bins_d, fm.mean_bins);
    std::size_t hits = 0;
    for (const auto h : hit) hits += h;
    fm.hit_rate = static_cast<double>(hits) / static_cast<double>(n);
    fm.w_l = fm.mean_comparisons / baseline;
    fm.w_u = (fm.mean_comparisons + fm.std_comparisons) / baseline;
    rep.fold_metrics.push_back(fm);
    rep.comparison_logs.push_back(std::move(comp));
    rep.bin_logs.push_back(std::move(bins));
  }

  finalize_aggregates(rep);
  return closed_cache_.emplace(key, std::move(rep)).first->second;
}

EvalReport Bench::closed_set_exhaustive() {
  EvalReport rep = base_report("closed", "exhaustive", 0);
  const std::size_t m = chars_.size();
  for (int f = 0; f < protocol_.folds; ++f) {
    const auto pool = fold_pool(f);
    const std::size_t n = pool.size();
    FoldMetrics fm;
    fm.fold = f;
    fm.enrolled = n;
    fm.probes = n;
    fm.hit_rate = 1.0;
    fm.mean_comparisons = static_cast<double>(n * m);
    fm.std_comparisons = 0.0;
    fm.w_l = 1.0;
    fm.w_u = 1.0;
    rep.fold_metrics.push_back(fm);
    rep.comparison_logs.emplace_back(n, static_cast<std::uint64_t>(n * m));
    rep.bin_logs.emplace_back(n, 0u);
  }
  finalize_aggregates(rep);
  return rep;
}

std::size_t Bench::resolve_t(Strategy strategy, int k) {
  const EvalReport& rep = closed_set(strategy, k);
  const double raw = rep.mean_bins + rep.std_bins;
  const std::uint64_t cap = std::uint64_t{1} << k;
  long long t = std::llround(raw);
  if (t < 1) t = 1;
  if (t > static_cast<long long>(cap)) t = static_cast<long long>(cap);
  return static_cast<std::size_t>(t);
}

EvalReport Bench::open_set(Strategy strategy, int k, const TPolicy& t_policy) {
  require_k(k);
  const std::size_t t = t_policy.kind == TPolicy::Kind::kFixed
                            ? t_policy.value
                            : resolve_t(strategy, k);
  const std::uint64_t cap = std::uint64_t{1} << k;
  if (t < 1 || t > cap)
    throw ArgumentError("t must be in [1, " + std::to_string(cap) + "], got " +
                        std::to_string(t));

  EvalReport rep = base_report("open", strategy_name(strategy), k);
  rep.t = t;
  const std::size_t m = chars_.size();
  ScorePool pool_scores;

  for (int f = 0; f < protocol_.folds; ++f) {
    std::vector<std::size_t> enrolled;
    std::vector<std::size_t> nonmated;
    split_fold_pool(f, enrolled, nonmated);
    const BinTable table = build_table(enrolled, f, strategy, k);
    const std::size_t n = enrolled.size();
    const std::size_t total = n + nonmated.size();

    std::vector<std::uint64_t> comp(total);
    std::vector<std::uint32_t> bins(total);
    std::vector<double> score(total, 0.0);
    std::vector<unsigned char> present(total, 0);
    par::for_each_index(total, exec_, [&](std::size_t i) {
      const bool is_mated = i < n;
      const std::size_t id = is_mated ? enrolled[i] : nonmated[i - n];
      const auto probe = templates_of(id, f, false);
      const auto res = search(probe, table, t, calibration_, search_opts_);
      comp[i] = res.comparisons;
      bins[i] = res.bins_visited;
      if (is_mated) {
        for (const auto& c : res.ranked) {
          if (c.record_index == i) {
            score[i] = c.score;
            present[i] = 1;
            break;
          }
        }
      } else if (!res.ranked.empty()) {
        score[i] = res.ranked.front().score;
        present[i] = 1;
      }
    });

    for (std::size_t i = 0; i < total; ++i) {
      const bool is_mated = i < n;
      auto& scores =
          is_mated ? pool_scores.mated : pool_scores.nonmated;
      auto& absent =
          is_mated ? pool_scores.mated_absent : pool_scores.nonmated_absent;
      if (present[i])
        scores.push_back(score[i]);
      else
        ++absent;
    }

    FoldMetrics fm;
    fm.fold = f;
    fm.enrolled = n;
    fm.probes = total;
    std::vector<double> comp_d(comp.begin(), comp.end());
    std::vector<double> bins_d(bins.begin(), bins.end());
    fm.mean_comparisons = mean_of(comp_d);
    fm.std_comparisons = pop_std_of(comp_d, fm.mean_comparisons);
    fm.mean_bins = mean_of(bins_d);
    fm.std_bins = pop_std_of(bins_d, fm.mean_bins);
    fm.w_open = fm.mean_comparisons / static_cast<double>(n * m);
    rep.fold_metrics.push_back(fm);
    rep.comparison_logs.push_back(std::move(comp));
    rep.bin_logs.push_back(std::move(bins));
  }

  finalize_aggregates(rep);
  rep.det = det_curve(pool_scores.mated, pool_scores.mated_absent,
                      pool_scores.nonmated, pool_scores.nonmated_absent);
  rep.fnir_at_fpir_1pct = fnir_at_fpir(rep.det, 0.01);
  rep.fnir_at_fpir_10pct = fnir_at_fpir(rep.det, 0.1);
  return rep;
}

EvalReport Bench::open_set_exhaustive() {
  EvalReport rep = base_report("open", "exhaustive", 0);
  const std::size_t m = chars_.size();
  ScorePool pool_scores;

  for (int f = 0; f < protocol_.folds; ++f) {
    std::vector<std::size_t> enrolled;
    std::vector<std::size_t> nonmated;
    split_fold_pool(f, enrolled, nonmated);
    // Strategy and k only shape the bins, which an exhaustive search never
    // touches; the cheapest valid table serves as the template store.
    const BinTable table = build_table(enrolled, f, Strategy::kFeatureConcat, 1);
    const std::size_t n = enrolled.size();
    const std::size_t total = n + nonmated.size();

    std::vector<std::uint64_t> comp(total);
    std::vector<double> score(total, 0.0);
    std::vector<unsigned char> present(total, 0);
    par::for_each_index(total, exec_, [&](std::size_t i) {
      const bool is_mated = i < n;
      const std::size_t id = is_mated ? enrolled[i] : nonmated[i - n];
      const auto probe = templates_of(id, f, false);
      const auto res = exhaustive_search(probe, table, calibration_);
      comp[i] = res.comparisons;
      if (is_mated) {
        for (const auto& c : res.ranked) {
          if (c.record_index == i) {
            score[i] = c.score;
            present[i] = 1;
            break;
          }
        }
      } else if (!res.ranked.empty()) {
        score[i] = res.ranked.front().score;
        present[i] = 1;
      }
    });

    for (std::size_t i = 0; i < total; ++i) {
      const bool is_mated = i < n;
      auto& scores = is_mated ? pool_scores.mated : pool_scores.nonmated;
      auto& absent =
          is_mated ? pool_scores.mated_absent : pool_scores.nonmated_absent;
      if (present[i])
        scores.push_back(score[i]);
      else
        ++absent;
    }

    FoldMetrics fm;
    fm.fold = f;
    fm.enrolled = n;
    fm.probes = total;
    std::vector<double> comp_d(comp.begin(), comp.end());
    fm.mean_comparisons = mean_of(comp_d);
    fm.std_comparisons = pop_std_of(comp_d, fm.mean_comparisons);
    fm.w_open = fm.mean_comparisons / static_cast<double>(n * m);
    rep.fold_metrics.push_back(fm);
    rep.comparison_logs.push_back(std::move(comp));
    rep.bin_logs.emplace_back(total, 0u);
  }

  finalize_aggregates(rep);
  rep.det = det_curve(pool_scores.mated, pool_scores.mated_absent,
                      pool_scores.nonmated, pool_scores.nonmated_absent);
  rep.fnir_at_fpir_1pct = fnir_at_fpir(rep.det, 0.01);
  rep.fnir_at_fpir_10pct = fnir_at_fpir(rep.det, 0.1);
  return rep;
}

std::vector<EvalReport> Bench::k_sweep(Strategy strategy,
                                       const std::vector<int>& ks) {
  if (ks.empty()) throw ArgumentError("k sweep needs at least one k");
  std::vector<EvalReport> out;
  out.reserve(ks.size());
  for (const int k : ks) out.push_back(closed_set(strategy, k));
  return out;
}

}  // namespace fbpindex
