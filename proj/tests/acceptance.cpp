// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Acceptance checklist.
//
// Eleven go/no-go checks covering the whole pipeline: oracle equivalence,
// workload accounting, baseline identities, noise-free behaviour, budget
// monotonicity, order invariance, the workload-versus-k trend, fusion
// benefit, reported-number arithmetic, template sizes and determinism.
// Each check prints one [PASS]/[FAIL] line; the binary exits non-zero if
// any check fails.
//
// Usage: acceptance <path to the fbpindex CLI binary>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fbpindex/datagen.hpp"
#include "fbpindex/evalbench.hpp"
#include "fbpindex/fbp.hpp"
#include "fbpindex/index.hpp"
#include "fbpindex/ioutil.hpp"
#include "fbpindex/report.hpp"
#include "fbpindex/retrieve.hpp"
#include "fbpindex/rng.hpp"

using namespace fbpindex;

namespace {

std::string g_cli_path;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

BinaryTemplate random_bits(rng::Xoshiro256ss& g, std::size_t n) {
  BinaryTemplate b(n);
  for (std::size_t i = 0; i < n; ++i) b.set_bit(i, (g.next() & 1) != 0);
  return b;
}

ProtectedTemplate sign_template(rng::Xoshiro256ss& g, std::size_t n) {
  ProtectedTemplate t;
  t.scheme = Scheme::kSign;
  t.bits = random_bits(g, n);
  return t;
}

std::map<std::string, SchemeConfig> uniform_schemes(
    const std::vector<std::string>& names, Scheme scheme, std::size_t length,
    std::size_t slots = 64, std::uint32_t projections = 8) {
  std::map<std::string, SchemeConfig> out;
  std::uint64_t seed = 101;
  for (const auto& n : names) {
    SchemeConfig cfg;
    cfg.scheme = scheme;
    cfg.seed = seed++;
    cfg.biohash_length = length;
    cfg.iom_slots = slots;
    cfg.iom_projections = projections;
    out[n] = cfg;
  }
  return out;
}

// --- 1. extract_patterns against a string-slicing oracle -------------------

bool fp_oracle_equivalence(std::string& note) {
  const auto start = Clock::now();
  rng::Xoshiro256ss g(0xacc1);
  for (int round = 0; round < 1000; ++round) {
    const int k = 1 + static_cast<int>(g.next() % 8);
    const std::size_t n =
        static_cast<std::size_t>(k) + 1 + g.next() % (64 - k);
    const BinaryTemplate f = random_bits(g, n);

    const std::string s = f.to_string();
    std::map<std::uint64_t, std::uint32_t> counts;
    for (std::size_t i = 0; i + k <= s.size(); ++i) {
      std::uint64_t v = 0;
      for (int j = 0; j < k; ++j)
        v = (v << 1) | static_cast<std::uint64_t>(s[i + j] - '0');
      ++counts[v];
    }
    std::vector<std::pair<std::uint64_t, std::uint32_t>> expect(
        counts.begin(), counts.end());
    std::stable_sort(expect.begin(), expect.end(),
                     [](const auto& a, const auto& b) {
                       if (a.second != b.second) return a.second > b.second;
                       return a.first < b.first;
                     });

    const PatternList pl = extract_patterns(f, k);
    if (pl.entries.size() != expect.size()) return false;
    for (std::size_t i = 0; i < expect.size(); ++i) {
      if (pl.entries[i].pattern.value != expect[i].first) return false;
      if (pl.entries[i].pattern.k != k) return false;
      if (pl.entries[i].count != expect[i].second) return false;
    }
  }
  const double elapsed = seconds_since(start);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "1000 cases, %.2f s", elapsed);
  note = buf;
  return elapsed < 5.0;
}

// --- 2. comparisons == m * sum of visited occupancies -----------------------

bool workload_accounting(std::string& note) {
  rng::Xoshiro256ss g(0xacc2);
  const std::vector<std::string> names = {"a", "b"};
  std::vector<EnrolRecord> recs;
  for (int i = 0; i < 60; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "s%03d", i);
    EnrolRecord r;
    r.subject_id = id;
    r.templates = {sign_template(g, 48), sign_template(g, 48)};
    recs.push_back(std::move(r));
  }
  CalibrationMap calib = {{"a", {0.0, 1.0}}, {"b", {0.0, 1.0}}};

  std::size_t checked = 0;
  for (const auto strategy : {Strategy::kFeatureConcat, Strategy::kRankedCodes,
                              Strategy::kXorCodes}) {
    for (const int k : {3, 4, 5}) {
      const BinTable table = BinTable::build(recs, strategy, k, names);
      for (int round = 0; round < 60; ++round) {
        const std::vector<ProtectedTemplate> probe = {sign_template(g, 48),
                                                      sign_template(g, 48)};
        const std::size_t t = 1 + g.next() % (1ull << k);
        const SearchResult res = search(probe, table, t, calib);

        // Recount: walk the published sequence and add up occupancies.
        std::uint64_t members = 0;
        std::uint32_t visited = 0;
        std::size_t used = 0;
        for (const auto& p : probe_sequence(probe, strategy, k)) {
          if (used == t) break;
          const auto* bin = table.bin(p);
          members += bin ? bin->size() : 0;
          ++used;
          ++visited;
        }
        if (res.comparisons != members * names.size()) return false;
        if (res.bins_visited != visited) return false;
        ++checked;
      }
    }
  }
  note = std::to_string(checked) + " searches";
  return checked >= 500;
}

// --- 3. exhaustive baseline: W = 100.00%, H-R = 100% ------------------------

bool exhaustive_baseline(std::string& note) {
  SynthSpec spec;
  spec.seed = 7;
  spec.identities = 50;
  spec.characteristics = {{"ca", 48, 0.3, 2}, {"cb", 48, 0.6, 2}};
  const auto ds = generate(spec);
  const std::vector<std::string> names = {"ca", "cb"};
  Protocol protocol;
  protocol.folds = 3;
  protocol.calibration_identities = 10;
  protocol.open_set_split = 0.25;
  protocol.seed = 7;
  Bench bench(ds, names, uniform_schemes(names, Scheme::kSign, 48), protocol);

  const auto closed = bench.closed_set_exhaustive();
  const auto open = bench.open_set_exhaustive();
  note = "W_u " + format_fixed2(closed.w_u * 100.0) + "%, H-R " +
         format_fixed2(closed.hit_rate * 100.0) + "%";
  return closed.hit_rate == 1.0 && closed.w_l == 1.0 && closed.w_u == 1.0 &&
         format_fixed2(closed.w_u * 100.0) == "100.00" &&
         format_fixed2(closed.hit_rate * 100.0) == "100.00" &&
         open.w_open == 1.0;
}

// --- 4. zero noise: every probe hits its own bin first ----------------------

bool noiseless_self_search(std::string& note) {
  SynthSpec spec;
  spec.seed = 11;
  spec.identities = 40;
  spec.characteristics = {{"x", 32, 0.0, 2}, {"y", 32, 0.0, 2},
                          {"z", 32, 0.0, 2}};
  const auto ds = generate(spec);
  const std::vector<std::string> names = {"x", "y", "z"};
  Protocol protocol;
  protocol.folds = 3;
  protocol.calibration_identities = 8;
  protocol.open_set_split = 0.25;
  protocol.seed = 3;

  int combos = 0;
  for (const auto scheme :
       {Scheme::kSign, Scheme::kBioHashing, Scheme::kIomGrp}) {
    Bench bench(ds, names, uniform_schemes(names, scheme, 32), protocol);
    for (const auto strategy :
         {Strategy::kFeatureConcat, Strategy::kRankedCodes,
          Strategy::kXorCodes}) {
      const auto& rep = bench.closed_set(strategy, 4);
      if (rep.hit_rate != 1.0 || rep.mean_bins != 1.0 || rep.std_bins != 0.0)
        return false;
      ++combos;
    }
  }
  note = std::to_string(combos) + " scheme/strategy combinations";
  return combos == 9;
}

// --- 5. hit rate and workload never decrease with the budget ----------------

bool budget_monotonicity(std::string& note) {
  const SynthSpec spec = default_synth_spec();
  const auto ds = generate(spec);
  const std::vector<std::string> names = {"bcA", "bcB", "bcC"};
  constexpr int kBits = 5;
  constexpr std::size_t kMaxT = 1u << kBits;

  // (subject, characteristic) -> samples ordered by sample id.
  std::map<std::string, std::map<std::string, std::vector<const SampleRecord*>>>
      by_subject;
  for (const auto& rec : ds.records)
    by_subject[rec.subject_id][rec.characteristic].push_back(&rec);
  for (auto& [subject, chars] : by_subject)
    for (auto& [name, samples] : chars)
      std::sort(samples.begin(), samples.end(),
                [](const SampleRecord* a, const SampleRecord* b) {
                  return a->sample_id < b->sample_id;
                });

  const auto subjects = ds.subjects();
  std::vector<EnrolRecord> recs;
  std::vector<std::vector<ProtectedTemplate>> probes;
  for (const auto& subject : subjects) {
    EnrolRecord er;
    er.subject_id = subject;
    std::vector<ProtectedTemplate> probe;
    for (const auto& name : names) {
      const auto& samples = by_subject.at(subject).at(name);
      ProtectedTemplate enrol;
      enrol.scheme = Scheme::kSign;
      enrol.bits = sign_binarize(samples.front()->values);
      ProtectedTemplate mate;
      mate.scheme = Scheme::kSign;
      mate.bits = sign_binarize(samples.back()->values);
      er.templates.push_back(std::move(enrol));
      probe.push_back(std::move(mate));
    }
    recs.push_back(std::move(er));
    probes.push_back(std::move(probe));
  }
  const BinTable table =
      BinTable::build(std::move(recs), Strategy::kFeatureConcat, kBits, names);

  std::vector<double> hits(kMaxT + 1, 0.0);
  std::vector<double> work(kMaxT + 1, 0.0);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto seq =
        probe_sequence(probes[i], Strategy::kFeatureConcat, kBits);

    // First budget slot whose bin holds the mate; kMaxT + 1 on a miss.
    const auto full = walk_bins(seq, table, kMaxT);
    std::size_t mate_step = kMaxT + 1;
    for (std::size_t s = 0; s < full.size(); ++s) {
      const auto* bin = table.bin(full[s].pattern);
      if (!bin) continue;
      if (std::find(bin->begin(), bin->end(), static_cast<std::uint32_t>(i)) !=
          bin->end()) {
        mate_step = s;
        break;
      }
    }
    for (std::size_t t = 1; t <= kMaxT; ++t) {
      const auto steps = walk_bins(seq, table, t);
      std::uint64_t occ = 0;
      for (const auto& st : steps) occ += st.occupancy;
      work[t] += static_cast<double>(occ * names.size());
      if (mate_step < t) hits[t] += 1.0;
    }
  }

  const double baseline = static_cast<double>(probes.size()) *
                          static_cast<double>(table.size()) *
                          static_cast<double>(names.size());
  for (std::size_t t = 2; t <= kMaxT; ++t) {
    if (hits[t] < hits[t - 1]) return false;
    if (work[t] < work[t - 1]) return false;
  }
  note = "t=1.." + std::to_string(kMaxT) + ", H-R " +
         format_fixed2(hits[kMaxT] / static_cast<double>(probes.size()) *
                       100.0) +
         "% and W " + format_fixed2(work[kMaxT] / baseline * 100.0) +
         "% at full budget";
  return true;
}

// --- 6. ranked and xor reports ignore characteristic order ------------------

bool order_invariance(std::string& note) {
  SynthSpec spec;
  spec.seed = 17;
  spec.identities = 90;
  spec.characteristics = {{"pa", 96, 0.3, 2}, {"pb", 96, 0.5, 2},
                          {"pc", 96, 0.8, 2}};
  const auto ds = generate(spec);
  Protocol protocol;
  protocol.folds = 3;
  protocol.calibration_identities = 15;
  protocol.open_set_split = 0.2;
  protocol.seed = 9;

  std::vector<std::string> order = {"pa", "pb", "pc"};
  std::map<std::string, std::vector<std::string>> closed_dumps;
  std::map<std::string, std::vector<std::string>> open_dumps;
  int permutations = 0;
  do {
    Bench bench(ds, order, uniform_schemes(order, Scheme::kSign, 96),
                protocol);
    for (const auto strategy :
         {Strategy::kRankedCodes, Strategy::kXorCodes}) {
      const auto label = strategy_name(strategy);
      closed_dumps[label].push_back(
          report_to_json(bench.closed_set(strategy, 4)).dump());
      open_dumps[label].push_back(
          report_to_json(bench.open_set(strategy, 4, TPolicy::fixed(4)))
              .dump());
    }
    ++permutations;
  } while (std::next_permutation(order.begin(), order.end()));

  for (const auto& [label, dumps] : closed_dumps)
    for (const auto& d : dumps)
      if (d != dumps.front()) return false;
  for (const auto& [label, dumps] : open_dumps)
    for (const auto& d : dumps)
      if (d != dumps.front()) return false;
  note = std::to_string(permutations) +
         " orders, ranked and xor, closed and open";
  return permutations == 6;
}

// --- 7. workload falls as k grows, accuracy holds ---------------------------

bool k_trend(std::string& note) {
  const auto start = Clock::now();
  SynthSpec spec = default_synth_spec();
  spec.seed = 1;
  const auto ds = generate(spec);
  const std::vector<std::string> names = {"bcA", "bcB", "bcC"};
  Protocol protocol;  // stock ten-fold protocol
  protocol.seed = 5;
  Bench bench(ds, names, uniform_schemes(names, Scheme::kSign, 512), protocol);

  const auto reps = bench.k_sweep(Strategy::kFeatureConcat, {3, 4, 5, 6, 7, 8});
  for (std::size_t i = 1; i < reps.size(); ++i)
    if (!(reps[i].w_u < reps[i - 1].w_u)) return false;

  std::size_t best = 0;
  for (std::size_t i = 1; i < reps.size(); ++i)
    if (reps[i].w_u < reps[best].w_u) best = i;
  const double elapsed = seconds_since(start);
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "W_u %s%% (k=3) down to %s%% (k=8), H-R %s%% at k=%d, %.1f s",
                format_fixed2(reps.front().w_u * 100.0).c_str(),
                format_fixed2(reps.back().w_u * 100.0).c_str(),
                format_fixed2(reps[best].hit_rate * 100.0).c_str(),
                reps[best].k, elapsed);
  note = buf;
  return reps[best].hit_rate >= 0.99 && elapsed < 120.0;
}

// --- 8. fusing three characteristics beats the best single one --------------

// All pipelines operate at the same budget: the full pattern sequence at
// k = 6 (t = 64), so FNIR reflects sequence coverage and score separation
// rather than per-pipeline walk-depth quantiles.
bool fusion_benefit(std::string& note) {
  const std::vector<std::string> names = {"bcA", "bcB", "bcC"};
  const TPolicy budget = TPolicy::fixed(64);
  int wins = 0;
  for (int round = 1; round <= 10; ++round) {
    SynthSpec spec = default_synth_spec();
    spec.seed = 1000 + static_cast<std::uint64_t>(round);
    const auto ds = generate(spec);
    Protocol protocol;
    protocol.folds = 2;
    protocol.open_set_split = 0.2;
    protocol.seed = 77 + static_cast<std::uint64_t>(round);
    const auto schemes = uniform_schemes(names, Scheme::kSign, 512);

    Bench fused(ds, names, schemes, protocol);
    const double fused_fnir =
        fused.open_set(Strategy::kRankedCodes, 6, budget).fnir_at_fpir_10pct;

    double best_single = std::numeric_limits<double>::infinity();
    for (const auto& name : names) {
      Bench single(ds, {name}, {{name, schemes.at(name)}}, protocol);
      const double fnir =
          single.open_set(Strategy::kRankedCodes, 6, budget).fnir_at_fpir_10pct;
      best_single = std::min(best_single, fnir);
    }
    if (fused_fnir <= best_single + 1e-12) ++wins;
  }
  note = std::to_string(wins) + "/10 rounds favour fusion";
  return wins >= 8;
}

// --- 9. reported workload numbers are exactly the defined ratios ------------

bool workload_arithmetic(std::string& note) {
  SynthSpec spec;
  spec.seed = 23;
  spec.identities = 60;
  spec.characteristics = {{"ca", 64, 0.4, 2}, {"cb", 64, 0.6, 2}};
  const auto ds = generate(spec);
  const std::vector<std::string> names = {"ca", "cb"};
  Protocol protocol;
  protocol.folds = 3;
  protocol.calibration_identities = 12;
  protocol.open_set_split = 0.25;
  protocol.seed = 13;
  Bench bench(ds, names, uniform_schemes(names, Scheme::kSign, 64), protocol);
  const auto& rep = bench.closed_set(Strategy::kFeatureConcat, 4);

  double w_l_sum = 0.0;
  double w_u_sum = 0.0;
  for (std::size_t f = 0; f < rep.comparison_logs.size(); ++f) {
    const auto& log = rep.comparison_logs[f];
    double sum = 0.0;
    for (const auto c : log) sum += static_cast<double>(c);
    const double mean = sum / static_cast<double>(log.size());
    double sq = 0.0;
    for (const auto c : log) {
      const double d = static_cast<double>(c) - mean;
      sq += d * d;
    }
    const double stddev = std::sqrt(sq / static_cast<double>(log.size()));
    const double baseline =
        static_cast<double>(rep.fold_metrics[f].enrolled) *
        static_cast<double>(names.size());
    if (rep.fold_metrics[f].w_l != mean / baseline) return false;
    if (rep.fold_metrics[f].w_u != (mean + stddev) / baseline) return false;
    w_l_sum += mean / baseline;
    w_u_sum += (mean + stddev) / baseline;
  }
  const auto folds = static_cast<double>(rep.comparison_logs.size());
  if (rep.w_l != w_l_sum / folds || rep.w_u != w_u_sum / folds) return false;

  // Published-style sanity: mean 451.1, std 282.18, N*m = 1008.
  const bool upper_ok =
      format_fixed2(100.0 * (451.1 + 282.18) / 1008.0) == "72.75";
  const bool lower_ok = format_fixed2(100.0 * 451.1 / 1008.0) == "44.75";
  note = "fold and aggregate ratios exact; 72.75/44.75 reproduced";
  return upper_ok && lower_ok;
}

// --- 10. IoM template size: 512 slots at 16 projections = 2048 bits ---------

bool iom_template_size(std::string& note) {
  SchemeConfig cfg;
  cfg.scheme = Scheme::kIomGrp;
  cfg.seed = 5;
  cfg.iom_slots = 512;
  cfg.iom_projections = 16;
  const Protector protector(cfg, 64);
  if (protector.template_bits() != 2048) return false;

  rng::GaussianStream gs(99);
  Embedding e(64);
  for (auto& v : e) v = static_cast<float>(gs.next());
  const ProtectedTemplate t = protector(e);
  note = "512 slots x log2(16) bits = " + std::to_string(t.bits.size()) +
         " bits";
  return t.bits.size() == 2048 && t.ints.size() == 512 &&
         iom_encode(t.ints, 16).size() == 2048;
}

// --- 11. two identical CLI runs produce identical report bytes --------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool determinism(std::string& note) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("fbpindex_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cfg = (dir / "run.json").string();
  io::atomic_write_file(cfg, R"({
  "seed": 3,
  "synth": {
    "identities": 60,
    "characteristics": [
      {"name": "left", "dim": 64, "sigma": 0.3, "samples": 2},
      {"name": "right", "dim": 64, "sigma": 0.5, "samples": 2}
    ]
  },
  "protocol": {"folds": 3, "calibration_identities": 10,
               "open_set_split": 0.25},
  "k": 4,
  "t": {"policy": "fixed", "value": 4}
}
)");

  const std::string d1 = (dir / "run1").string();
  const std::string d2 = (dir / "run2").string();
  for (const auto& out : {d1, d2}) {
    const std::string cmd = g_cli_path + " bench --config " + cfg + " --out " +
                            out + " > " + (dir / "bench.log").string() +
                            " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc < 0 || WEXITSTATUS(rc) != 0) return false;
  }
  const std::string json1 = slurp(d1 + "/report.json");
  const std::string csv1 = slurp(d1 + "/report.csv");
  if (json1.empty() || csv1.empty()) return false;
  note = "report.json " + std::to_string(json1.size()) + " bytes, twice";
  return json1 == slurp(d2 + "/report.json") &&
         csv1 == slurp(d2 + "/report.csv");
}

using Check = bool (*)(std::string&);

struct Criterion {
  const char* name;
  Check check;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path to fbpindex binary>\n");
    return 2;
  }
  g_cli_path = argv[1];

  const Criterion criteria[] = {
      {"pattern extraction matches the naive window oracle",
       fp_oracle_equivalence},
      {"search workload equals m * sum of visited bin sizes",
       workload_accounting},
      {"exhaustive baseline reports 100.00% workload and hit rate",
       exhaustive_baseline},
      {"noise-free probes hit their own bin first, every scheme and strategy",
       noiseless_self_search},
      {"hit rate and workload are non-decreasing in the visit budget",
       budget_monotonicity},
      {"ranked and xor reports are bit-identical under reordering",
       order_invariance},
      {"upper workload bound falls strictly from k=3 to k=8 at >=99% hit rate",
       k_trend},
      {"fused three-characteristic FNIR beats the best single characteristic",
       fusion_benefit},
      {"reported workload bounds recompute exactly from raw logs",
       workload_arithmetic},
      {"IoM-GRP with 512 slots and 16 projections yields 2048-bit templates",
       iom_template_size},
      {"two identical benchmark runs emit byte-identical reports",
       determinism},
  };

  std::printf("acceptance checklist\n");
  std::printf("====================\n");
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    bool ok = false;
    std::string detail;
    try {
      ok = c.check(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("[%s] %2d  %s%s%s\n", ok ? "PASS" : "FAIL", index, c.name,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("all 11 checks passed\n");
    return 0;
  }
  std::printf("%d of 11 checks FAILED\n", failures);
  return 1;
}
