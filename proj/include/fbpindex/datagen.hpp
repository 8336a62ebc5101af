// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Synthetic multi-characteristic embedding data.
//
// Each identity gets one standard-normal mean vector per characteristic;
// samples are that mean plus sigma-scaled gaussian noise.  Streams are keyed
// by (seed, characteristic name, identity index, sample index), never by the
// position of the characteristic in the configuration, so two runs whose
// configurations list the same characteristics in a different order produce
// identical vectors.

#ifndef FBPINDEX_DATAGEN_HPP_
#define FBPINDEX_DATAGEN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "fbpindex/parallel.hpp"
#include "fbpindex/protect.hpp"

namespace fbpindex {

struct CharacteristicSpec {
  std::string name;
  std::size_t dim = 512;
  double sigma = 0.5;
  std::size_t samples = 2;

  bool operator==(const CharacteristicSpec& o) const = default;
};

struct SynthSpec {
  std::uint64_t seed = 1;
  std::size_t identities = 1000;
  std::vector<CharacteristicSpec> characteristics;

  bool operator==(const SynthSpec& o) const = default;
};

// Three 512-dimensional characteristics with low, medium and high
// within-identity noise: a stand-in for modalities of unequal quality.
SynthSpec default_synth_spec();

struct SampleRecord {
  std::string subject_id;
  std::string characteristic;
  std::uint32_t sample_id = 0;
  Embedding values;

  bool operator==(const SampleRecord& o) const = default;
};

struct EmbeddingDataset {
  std::vector<SampleRecord> records;

  // Characteristic names with dimensions, in first-appearance order.
  std::vector<std::pair<std::string, std::size_t>> characteristics() const;
  // Subject identifiers in first-appearance order.
  std::vector<std::string> subjects() const;

  bool operator==(const EmbeddingDataset& o) const = default;
};

// Deterministic for a given spec.  Record order: identity-major, then
// characteristic in spec order, then sample.
EmbeddingDataset generate(const SynthSpec& spec, Exec exec = Exec::kParallel);

// Checks that every value is finite, dimensions are consistent per
// characteristic, every subject carries the full characteristic set and
// every (subject, characteristic) pair has at least two samples with unique
// sample ids.  Throws DataError.
void validate(const EmbeddingDataset& ds);

// Text form: header "subject_id,characteristic,sample_id,v0..v{d-1}".
// Requires a single dimension across characteristics.
void save_csv(const EmbeddingDataset& ds, const std::string& path);
EmbeddingDataset load_csv(const std::string& path);

// Packed form: "FBPD" magic, version, JSON manifest, float32 payload in
// record order.  Lossless and byte-stable.
void save_packed(const EmbeddingDataset& ds, const std::string& path);
EmbeddingDataset load_packed(const std::string& path);

// Dispatches on the ".csv" extension, packed otherwise.
void save_dataset(const EmbeddingDataset& ds, const std::string& path);
EmbeddingDataset load_dataset(const std::string& path);

}  // namespace fbpindex

#endif  // FBPINDEX_DATAGEN_HPP_
