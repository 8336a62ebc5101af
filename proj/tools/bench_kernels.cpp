// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Serial vs parallel kernel timings.
//
// Each kernel runs in both execution modes; results must agree bit for bit,
// otherwise the program fails.  Times are the best of --repeat runs.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbpindex/datagen.hpp"
#include "fbpindex/evalbench.hpp"
#include "fbpindex/report.hpp"
#include "fbpindex/rng.hpp"

namespace {

using namespace fbpindex;
using Clock = std::chrono::steady_clock;

double time_best_ms(int repeat, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeat; ++r) {
    const auto start = Clock::now();
    fn();
    const auto stop = Clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    if (ms < best) best = ms;
  }
  return best;
}

struct Row {
  std::string name;
  double serial_ms = 0.0;
  double parallel_ms = 0.0;
  bool equal = false;
};

void print_rows(const std::vector<Row>& rows) {
  std::printf("%-28s %12s %12s %9s %7s\n", "kernel", "serial (ms)",
              "parallel (ms)", "speedup", "check");
  for (const auto& r : rows) {
    std::printf("%-28s %12.2f %12.2f %8.2fx %7s\n", r.name.c_str(),
                r.serial_ms, r.parallel_ms, r.serial_ms / r.parallel_ms,
                r.equal ? "ok" : "MISMATCH");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel benchmark"};
  std::size_t identities = 300;
  std::size_t dim = 256;
  int repeat = 3;
  std::uint64_t seed = 7;
  app.add_option("--identities", identities, "synthetic identities");
  app.add_option("--dim", dim, "embedding dimension");
  app.add_option("--repeat", repeat, "repetitions, best one counts");
  app.add_option("--seed", seed, "base seed");
  CLI11_PARSE(app, argc, argv);

  SynthSpec spec;
  spec.seed = seed;
  spec.identities = identities;
  spec.characteristics = {
      {"bcA", dim, 0.3, 2}, {"bcB", dim, 0.5, 2}, {"bcC", dim, 0.8, 2}};
  const EmbeddingDataset ds = generate(spec, Exec::kSerial);

  std::vector<Embedding> embeddings;
  embeddings.reserve(ds.records.size());
  for (const auto& rec : ds.records) embeddings.push_back(rec.values);

  std::vector<Row> rows;

  {
    SchemeConfig sc;
    sc.scheme = Scheme::kBioHashing;
    sc.seed = seed + 1;
    sc.biohash_length = dim;
    const Protector protector(sc, dim);
    std::vector<ProtectedTemplate> serial_out;
    std::vector<ProtectedTemplate> parallel_out;
    Row row;
    row.name = "protect biohashing";
    row.serial_ms = time_best_ms(repeat, [&] {
      serial_out = protect_batch(embeddings, protector, Exec::kSerial);
    });
    row.parallel_ms = time_best_ms(repeat, [&] {
      parallel_out = protect_batch(embeddings, protector, Exec::kParallel);
    });
    row.equal = serial_out == parallel_out;
    rows.push_back(row);
  }

  {
    SchemeConfig sc;
    sc.scheme = Scheme::kIomGrp;
    sc.seed = seed + 2;
    sc.iom_slots = 128;
    sc.iom_projections = 16;
    const Protector protector(sc, dim);
    std::vector<ProtectedTemplate> serial_out;
    std::vector<ProtectedTemplate> parallel_out;
    Row row;
    row.name = "protect iom_grp";
    row.serial_ms = time_best_ms(repeat, [&] {
      serial_out = protect_batch(embeddings, protector, Exec::kSerial);
    });
    row.parallel_ms = time_best_ms(repeat, [&] {
      parallel_out = protect_batch(embeddings, protector, Exec::kParallel);
    });
    row.equal = serial_out == parallel_out;
    rows.push_back(row);
  }

  {
    // One record per identity, first sample of each characteristic.
    SchemeConfig sc;
    sc.scheme = Scheme::kSign;
    std::map<std::string, Protector> protectors;
    for (const auto& c : spec.characteristics)
      protectors.emplace(c.name, Protector(sc, c.dim));
    std::vector<EnrolRecord> records;
    const auto subjects = ds.subjects();
    std::map<std::string, EnrolRecord> by_subject;
    for (const auto& rec : ds.records) {
      if (rec.sample_id != 0) continue;
      auto& er = by_subject[rec.subject_id];
      er.subject_id = rec.subject_id;
      er.templates.push_back(protectors.at(rec.characteristic)(rec.values));
    }
    for (const auto& s : subjects) records.push_back(by_subject.at(s));

    BinTable serial_table = BinTable::build(records, Strategy::kFeatureConcat,
                                            6, {"bcA", "bcB", "bcC"},
                                            Exec::kSerial);
    Row row;
    row.name = "bin table build (k=6)";
    row.serial_ms = time_best_ms(repeat, [&] {
      serial_table = BinTable::build(records, Strategy::kFeatureConcat, 6,
                                     {"bcA", "bcB", "bcC"}, Exec::kSerial);
    });
    BinTable parallel_table = serial_table;
    row.parallel_ms = time_best_ms(repeat, [&] {
      parallel_table = BinTable::build(records, Strategy::kFeatureConcat, 6,
                                       {"bcA", "bcB", "bcC"}, Exec::kParallel);
    });
    row.equal = serial_table == parallel_table;
    rows.push_back(row);
  }

  {
    std::map<std::string, SchemeConfig> schemes;
    for (const auto& c : spec.characteristics) {
      SchemeConfig sc;
      sc.scheme = Scheme::kBioHashing;
      sc.seed = seed + rng::fnv1a64(c.name);
      sc.biohash_length = c.dim;
      schemes[c.name] = sc;
    }
    Protocol protocol;
    protocol.folds = 5;
    protocol.calibration_identities =
        std::max<std::size_t>(10, identities / 10);
    protocol.seed = seed + 3;

    Row row;
    row.name = "closed-set evaluation";
    std::string serial_json;
    std::string parallel_json;
    row.serial_ms = time_best_ms(repeat, [&] {
      Bench b(ds, {"bcA", "bcB", "bcC"}, schemes, protocol, {}, Exec::kSerial);
      serial_json = reports_to_json({b.closed_set(Strategy::kFeatureConcat, 5)})
                        .dump();
    });
    row.parallel_ms = time_best_ms(repeat, [&] {
      Bench b(ds, {"bcA", "bcB", "bcC"}, schemes, protocol, {},
              Exec::kParallel);
      parallel_json =
          reports_to_json({b.closed_set(Strategy::kFeatureConcat, 5)}).dump();
    });
    row.equal = serial_json == parallel_json;
    rows.push_back(row);

    Row orow;
    orow.name = "open-set evaluation";
    orow.serial_ms = time_best_ms(repeat, [&] {
      Bench b(ds, {"bcA", "bcB", "bcC"}, schemes, protocol, {}, Exec::kSerial);
      serial_json = reports_to_json({b.open_set(Strategy::kFeatureConcat, 5,
                                                TPolicy::fixed(8))})
                        .dump();
    });
    orow.parallel_ms = time_best_ms(repeat, [&] {
      Bench b(ds, {"bcA", "bcB", "bcC"}, schemes, protocol, {},
              Exec::kParallel);
      parallel_json = reports_to_json({b.open_set(Strategy::kFeatureConcat, 5,
                                                  TPolicy::fixed(8))})
                          .dump();
    });
    orow.equal = serial_json == parallel_json;
    rows.push_back(orow);
  }

  print_rows(rows);
  for (const auto& r : rows) {
    if (!r.equal) {
      std::fprintf(stderr, "kernel '%s' disagrees between modes\n",
                   r.name.c_str());
      return 1;
    }
  }
  return 0;
}
