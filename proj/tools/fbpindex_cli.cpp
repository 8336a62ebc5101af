// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Command line front end.
//
// Exit codes: 0 ok, 2 configuration or usage error, 3 data or protocol
// error, 4 internal error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbpindex/config.hpp"
#include "fbpindex/evalbench.hpp"
#include "fbpindex/ioutil.hpp"
#include "fbpindex/report.hpp"

namespace {

using namespace fbpindex;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<int> k;
  std::optional<std::string> k_range;
  std::optional<std::size_t> t;
  std::optional<int> folds;
  std::optional<std::string> output_dir;
};

// Flags win over the configuration file.
void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.strategy) {
    cfg.exhaustive = *o.strategy == "exhaustive";
    if (!cfg.exhaustive) cfg.strategy = strategy_from_name(*o.strategy);
  }
  if (o.k && o.k_range)
    throw ConfigError("--k and --k-range are mutually exclusive");
  const auto check_k = [](int k) {
    if (k < 1 || k > kMaxPatternBits)
      throw ConfigError("k must be in [1, " +
                        std::to_string(kMaxPatternBits) + "]");
  };
  if (o.k) {
    check_k(*o.k);
    cfg.ks = {*o.k};
  }
  if (o.k_range) {
    int lo = 0;
    int hi = 0;
    if (std::sscanf(o.k_range->c_str(), "%d:%d", &lo, &hi) != 2)
      throw ConfigError("--k-range expects LO:HI");
    check_k(lo);
    check_k(hi);
    if (lo > hi) throw ConfigError("--k-range expects LO <= HI");
    cfg.ks.clear();
    for (int k = lo; k <= hi; ++k) cfg.ks.push_back(k);
  }
  if (o.t) {
    if (*o.t < 1) throw ConfigError("--t must be positive");
    cfg.t_policy = TPolicy::fixed(*o.t);
  }
  if (o.folds) {
    if (*o.folds < 2) throw ConfigError("--folds must be at least 2");
    cfg.protocol.folds = *o.folds;
  }
}

RunConfig load_config(const std::string& config_path, const Overrides& o) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = load_run_config(config_path);
  apply_overrides(cfg, o);
  return cfg;
}

nlohmann::ordered_json scheme_config_to_json(const SchemeConfig& sc) {
  nlohmann::ordered_json j;
  j["scheme"] = scheme_name(sc.scheme);
  j["seed"] = sc.seed;
  switch (sc.scheme) {
    case Scheme::kSign:
      break;
    case Scheme::kBioHashing:
      j["length"] = sc.biohash_length;
      break;
    case Scheme::kIomGrp:
      j["slots"] = sc.iom_slots;
      j["projections"] = sc.iom_projections;
      break;
  }
  return j;
}

int cmd_synth(const RunConfig& cfg, const std::string& out) {
  const ResolvedRun run = resolve_run(cfg);
  save_dataset(run.dataset, out);
  std::printf("wrote %zu records (%zu identities, %zu characteristics) to %s\n",
              run.dataset.records.size(), run.dataset.subjects().size(),
              run.dataset.characteristics().size(), out.c_str());
  return 0;
}

int cmd_protect(const RunConfig& cfg, const std::string& out) {
  const ResolvedRun run = resolve_run(cfg);

  nlohmann::ordered_json j;
  j["format"] = "fbpindex.protected";
  j["version"] = 1;
  auto schemes = nlohmann::ordered_json::object();
  for (const auto& name : run.characteristics)
    schemes[name] = scheme_config_to_json(run.schemes.at(name));
  j["schemes"] = std::move(schemes);

  auto templates = nlohmann::ordered_json::array();
  std::size_t count = 0;
  std::map<std::string, std::size_t> dims;
  for (const auto& [name, dim] : run.dataset.characteristics()) dims[name] = dim;
  std::map<std::string, Protector> protectors;
  for (const auto& name : run.characteristics)
    protectors.emplace(name, Protector(run.schemes.at(name), dims.at(name)));
  for (const auto& rec : run.dataset.records) {
    const auto it = protectors.find(rec.characteristic);
    if (it == protectors.end()) continue;
    const ProtectedTemplate t = it->second(rec.values);
    nlohmann::ordered_json tj;
    tj["subject"] = rec.subject_id;
    tj["characteristic"] = rec.characteristic;
    tj["sample"] = rec.sample_id;
    tj["scheme"] = scheme_name(t.scheme);
    tj["n"] = t.bits.size();
    tj["bits"] = t.bits.to_hex();
    if (t.scheme == Scheme::kIomGrp) {
      tj["q"] = t.iom_projections;
      tj["ints"] = t.ints;
    }
    templates.push_back(std::move(tj));
    ++count;
  }
  j["templates"] = std::move(templates);
  io::atomic_write_file(out, j.dump(2) + "\n");
  std::printf("wrote %zu protected templates to %s\n", count, out.c_str());
  return 0;
}

// Enrols every subject with its lowest sample id per characteristic.
BinTable build_index_table(const ResolvedRun& run, Strategy strategy, int k) {
  std::map<std::string, std::size_t> dims;
  for (const auto& [name, dim] : run.dataset.characteristics())
    dims[name] = dim;
  std::map<std::string, Protector> protectors;
  for (const auto& name : run.characteristics)
    protectors.emplace(name, Protector(run.schemes.at(name), dims.at(name)));

  const auto subjects = run.dataset.subjects();
  std::map<std::string, std::map<std::string, const SampleRecord*>> lowest;
  for (const auto& rec : run.dataset.records) {
    auto& slot = lowest[rec.subject_id][rec.characteristic];
    if (!slot || rec.sample_id < slot->sample_id) slot = &rec;
  }
  std::vector<EnrolRecord> records;
  records.reserve(subjects.size());
  for (const auto& subject : subjects) {
    EnrolRecord er;
    er.subject_id = subject;
    for (const auto& name : run.characteristics) {
      const auto& by_char = lowest.at(subject);
      const auto it = by_char.find(name);
      if (it == by_char.end())
        throw DataError("subject '" + subject +
                        "' lacks characteristic '" + name + "'");
      er.templates.push_back(protectors.at(name)(it->second->values));
    }
    records.push_back(std::move(er));
  }
  return BinTable::build(std::move(records), strategy, k,
                         run.characteristics);
}

int cmd_index(const RunConfig& cfg, const std::string& out) {
  if (cfg.exhaustive)
    throw ConfigError("an index needs a bin strategy, not 'exhaustive'");
  if (cfg.ks.size() != 1)
    throw ConfigError("building an index needs a single k");
  const ResolvedRun run = resolve_run(cfg);
  const BinTable table = build_index_table(run, cfg.strategy, cfg.ks.front());
  table.save(out);
  const auto stats = table.occupancy_stats();
  std::printf("indexed %zu subjects into %zu bins (k=%d, %s); occupancy %s±%s\n",
              table.size(), table.bin_count(), table.k(),
              strategy_name(table.strategy()).c_str(),
              format_fixed2(stats.mean).c_str(),
              format_fixed2(stats.stddev).c_str());
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_search(const RunConfig& cfg, const std::string& index_path,
               const std::string& subject, std::optional<std::uint32_t> sample,
               std::size_t t, std::size_t top) {
  const ResolvedRun run = resolve_run(cfg);
  const BinTable table = BinTable::load(index_path);

  std::map<std::string, std::size_t> dims;
  for (const auto& [name, dim] : run.dataset.characteristics())
    dims[name] = dim;

  // Probe: the requested sample id, or the second-lowest one.
  std::vector<ProtectedTemplate> probe;
  for (const auto& name : table.characteristic_order()) {
    const auto sit = run.schemes.find(name);
    if (sit == run.schemes.end())
      throw ConfigError("no scheme configured for characteristic '" + name +
                        "'");
    std::vector<const SampleRecord*> candidates;
    for (const auto& rec : run.dataset.records) {
      if (rec.subject_id == subject && rec.characteristic == name)
        candidates.push_back(&rec);
    }
    if (candidates.empty())
      throw DataError("no samples of subject '" + subject +
                      "' for characteristic '" + name + "'");
    std::sort(candidates.begin(), candidates.end(),
              [](const SampleRecord* a, const SampleRecord* b) {
                return a->sample_id < b->sample_id;
              });
    const SampleRecord* chosen = nullptr;
    if (sample) {
      for (const auto* rec : candidates)
        if (rec->sample_id == *sample) chosen = rec;
      if (!chosen)
        throw DataError("subject '" + subject + "' has no sample " +
                        std::to_string(*sample) + " for characteristic '" +
                        name + "'");
    } else {
      chosen = candidates.size() > 1 ? candidates[1] : candidates[0];
    }
    const Protector protector(sit->second, dims.at(name));
    probe.push_back(protector(chosen->values));
  }

  const CalibrationMap calibration =
      calibrate(run.dataset, table.characteristic_order(), run.schemes,
                run.protocol);
  const SearchResult res = search(probe, table, t, calibration, cfg.search);

  std::printf("visited %u bins, %llu comparisons (N*m = %zu)\n",
              res.bins_visited,
              static_cast<unsigned long long>(res.comparisons),
              table.size() * table.characteristic_order().size());
  const std::size_t shown = std::min(top, res.ranked.size());
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& c = res.ranked[i];
    std::printf("%3zu  %-12s  %.6f\n", i + 1,
                table.record(c.record_index).subject_id.c_str(), c.score);
  }
  if (res.ranked.empty()) std::printf("no candidates\n");
  return 0;
}

void print_report_line(const EvalReport& rep) {
  if (rep.scenario == "closed") {
    std::printf(
        "closed  %-14s k=%-2d  N=%-5zu H-R=%s%%  W_l=%s%%  W_u=%s%%  "
        "bins=%s±%s\n",
        rep.strategy.c_str(), rep.k, rep.identities,
        format_fixed2(rep.hit_rate * 100.0).c_str(),
        format_fixed2(rep.w_l * 100.0).c_str(),
        format_fixed2(rep.w_u * 100.0).c_str(),
        format_fixed2(rep.mean_bins).c_str(),
        format_fixed2(rep.std_bins).c_str());
  } else {
    std::printf(
        "open    %-14s k=%-2d t=%-4zu W=%s%%  FNIR@0.01=%s%%  "
        "FNIR@0.1=%s%%\n",
        rep.strategy.c_str(), rep.k, rep.t,
        format_fixed2(rep.w_open * 100.0).c_str(),
        format_fixed2(rep.fnir_at_fpir_1pct * 100.0).c_str(),
        format_fixed2(rep.fnir_at_fpir_10pct * 100.0).c_str());
  }
}

int run_bench(const RunConfig& cfg, bool closed_only) {
  const ResolvedRun run = resolve_run(cfg);
  Bench bench(run.dataset, run.characteristics, run.schemes, run.protocol,
              cfg.search);

  std::vector<EvalReport> reports;
  for (const auto& scenario : cfg.scenarios) {
    if (scenario == "closed") {
      if (cfg.exhaustive) {
        reports.push_back(bench.closed_set_exhaustive());
      } else {
        for (const int k : cfg.ks)
          reports.push_back(bench.closed_set(cfg.strategy, k));
      }
    } else if (!closed_only) {
      if (cfg.exhaustive) {
        reports.push_back(bench.open_set_exhaustive());
      } else {
        for (const int k : cfg.ks)
          reports.push_back(bench.open_set(cfg.strategy, k, cfg.t_policy));
      }
    }
  }
  for (const auto& rep : reports) print_report_line(rep);
  write_reports(reports, cfg.output_dir);
  std::printf("wrote %s/report.json and %s/report.csv\n",
              cfg.output_dir.c_str(), cfg.output_dir.c_str());
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.exhaustive)
    throw ConfigError("a k sweep needs a bin strategy, not 'exhaustive'");
  RunConfig closed = cfg;
  closed.scenarios = {"closed"};
  return run_bench(closed, true);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"frequent-pattern indexing over protected biometric templates"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;
  std::string out_path;
  std::string index_path;
  std::string subject;
  std::optional<std::uint32_t> sample;
  std::size_t t = 0;
  std::size_t top = 10;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration JSON file");
    sub->add_option("--seed", o.seed, "override the configuration seed");
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(synth);
  synth->add_option("--out", out_path, "dataset file (.csv or packed)")
      ->required();

  auto* protect = app.add_subcommand("protect", "protect every sample");
  add_common(protect);
  protect->add_option("--out", out_path, "protected template JSON file")
      ->required();

  auto* index = app.add_subcommand("index", "build and save a bin table");
  add_common(index);
  index->add_option("--out", out_path, "index JSON file")->required();
  index->add_option("--k", o.k, "pattern length");
  index->add_option("--strategy", o.strategy,
                    "feature_concat | ranked_codes | xor_codes");

  auto* search = app.add_subcommand("search", "probe a saved index");
  add_common(search);
  search->add_option("--index", index_path, "index JSON file")->required();
  search->add_option("--subject", subject, "probe subject id")->required();
  search->add_option("--sample", sample, "probe sample id");
  search->add_option("--t", t, "bin visit budget")->required();
  search->add_option("--top", top, "candidates to print");

  auto* bench = app.add_subcommand("bench", "run the evaluation protocol");
  add_common(bench);
  bench->add_option("--out", o.output_dir, "report directory");
  bench->add_option("--strategy", o.strategy,
                    "feature_concat | ranked_codes | xor_codes | exhaustive");
  bench->add_option("--k", o.k, "pattern length");
  bench->add_option("--k-range", o.k_range, "LO:HI pattern lengths");
  bench->add_option("--t", o.t, "fixed bin visit budget");
  bench->add_option("--folds", o.folds, "cross-validation folds");

  auto* sweep = app.add_subcommand("sweep", "closed-set sweep over k");
  add_common(sweep);
  sweep->add_option("--out", o.output_dir, "report directory");
  sweep->add_option("--strategy", o.strategy,
                    "feature_concat | ranked_codes | xor_codes");
  sweep->add_option("--k-range", o.k_range, "LO:HI pattern lengths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const RunConfig cfg = load_config(config_path, o);
  if (synth->parsed()) return cmd_synth(cfg, out_path);
  if (protect->parsed()) return cmd_protect(cfg, out_path);
  if (index->parsed()) return cmd_index(cfg, out_path);
  if (search->parsed())
    return cmd_search(cfg, index_path, subject, sample, t, top);
  if (bench->parsed()) return run_bench(cfg, false);
  if (sweep->parsed()) return cmd_sweep(cfg);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "argument error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 3;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const ProtocolError& e) {
    std::fprintf(stderr, "protocol error: %s\n", e.what());
    return 3;
  } catch (const EnrollmentError& e) {
    std::fprintf(stderr, "enrolment error: %s\n", e.what());
    return 3;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "dimension error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  }
}
