// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Run configuration.
//
// One JSON file drives a whole run; one top-level seed feeds every random
// stream through fixed derivation tags.  Parsing is strict: unknown keys are
// rejected so a typo cannot silently fall back to a default.

#ifndef FBPINDEX_CONFIG_HPP_
#define FBPINDEX_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbpindex/datagen.hpp"
#include "fbpindex/evalbench.hpp"

namespace fbpindex {

// Scheme settings as written in the file; unset fields take defaults that
// may depend on the characteristic (seed, length).
struct SchemeSpec {
  Scheme scheme = Scheme::kBioHashing;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> length;
  std::optional<std::size_t> slots;
  std::optional<std::uint32_t> projections;

  bool operator==(const SchemeSpec& o) const = default;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  // Exactly one data source; defaults to the synthetic default profile.
  std::optional<std::string> dataset_path;
  std::optional<SynthSpec> synth;

  // Characteristic subset and order; empty means all, in dataset order.
  std::vector<std::string> characteristics;
  // Per-characteristic schemes; unlisted characteristics use BioHashing.
  std::map<std::string, SchemeSpec> schemes;

  bool exhaustive = false;
  Strategy strategy = Strategy::kFeatureConcat;
  std::vector<int> ks = {5};
  TPolicy t_policy = TPolicy::derived();
  Protocol protocol;  // protocol.seed is derived from the top-level seed
  SearchOptions search;
  std::vector<std::string> scenarios = {"closed", "open"};
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Data plus fully resolved per-characteristic scheme configurations.
struct ResolvedRun {
  EmbeddingDataset dataset;
  std::vector<std::string> characteristics;  // as configured
  std::map<std::string, SchemeConfig> schemes;
  Protocol protocol;
};

// Loads or generates the dataset and fills every derived seed and default.
ResolvedRun resolve_run(const RunConfig& cfg, Exec exec = Exec::kParallel);

}  // namespace fbpindex

#endif  // FBPINDEX_CONFIG_HPP_
