// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "fbpindex/config.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "fbpindex/ioutil.hpp"
#include "fbpindex/rng.hpp"

namespace fbpindex {

namespace {

constexpr std::uint64_t kSynthTag = rng::fnv1a64("config.synth");
constexpr std::uint64_t kProtocolTag = rng::fnv1a64("config.protocol");
constexpr std::uint64_t kSchemeTag = rng::fnv1a64("config.scheme");

using nlohmann::json;

void check_keys(const json& j, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ConfigError(ctx + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + ctx);
  }
}

// True for any integer >= 0 however the JSON value is stored; parsed text
// yields unsigned storage but values built in memory may be signed.
bool is_nonneg_int(const json& j) {
  return j.is_number_unsigned() ||
         (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

std::uint64_t get_seed(const json& j, const std::string& ctx) {
  if (!is_nonneg_int(j))
    throw ConfigError(ctx + " must be an unsigned integer");
  return j.get<std::uint64_t>();
}

template <typename T>
T get_positive(const json& j, const std::string& ctx) {
  if (!is_nonneg_int(j) || j.get<std::uint64_t>() == 0)
    throw ConfigError(ctx + " must be a positive integer");
  return j.get<T>();
}

SchemeSpec parse_scheme_spec(const json& j, const std::string& ctx) {
  check_keys(j, ctx, {"scheme", "seed", "length", "slots", "projections"});
  SchemeSpec spec;
  if (j.contains("scheme")) {
    if (!j.at("scheme").is_string())
      throw ConfigError(ctx + ".scheme must be a string");
    spec.scheme = scheme_from_name(j.at("scheme").get<std::string>());
  }
  if (j.contains("seed")) spec.seed = get_seed(j.at("seed"), ctx + ".seed");
  if (j.contains("length"))
    spec.length = get_positive<std::size_t>(j.at("length"), ctx + ".length");
  if (j.contains("slots"))
    spec.slots = get_positive<std::size_t>(j.at("slots"), ctx + ".slots");
  if (j.contains("projections")) {
    spec.projections = get_positive<std::uint32_t>(j.at("projections"),
                                                   ctx + ".projections");
    if (!std::has_single_bit(*spec.projections) || *spec.projections < 2)
      throw ConfigError(ctx + ".projections must be a power of two >= 2");
  }
  return spec;
}

SynthSpec parse_synth(const json& j) {
  check_keys(j, "synth", {"identities", "characteristics"});
  SynthSpec spec = default_synth_spec();
  if (j.contains("identities"))
    spec.identities =
        get_positive<std::size_t>(j.at("identities"), "synth.identities");
  if (j.contains("characteristics")) {
    if (!j.at("characteristics").is_array() ||
        j.at("characteristics").empty())
      throw ConfigError("synth.characteristics must be a non-empty array");
    spec.characteristics.clear();
    for (const auto& cj : j.at("characteristics")) {
      check_keys(cj, "synth.characteristics[]",
                 {"name", "dim", "sigma", "samples"});
      CharacteristicSpec c;
      if (!cj.contains("name") || !cj.at("name").is_string())
        throw ConfigError("every synthetic characteristic needs a name");
      c.name = cj.at("name").get<std::string>();
      if (cj.contains("dim"))
        c.dim = get_positive<std::size_t>(cj.at("dim"), "characteristic.dim");
      if (cj.contains("sigma")) {
        if (!cj.at("sigma").is_number())
          throw ConfigError("characteristic.sigma must be a number");
        c.sigma = cj.at("sigma").get<double>();
        if (!(c.sigma >= 0.0))
          throw ConfigError("characteristic.sigma must be non-negative");
      }
      if (cj.contains("samples")) {
        c.samples = get_positive<std::size_t>(cj.at("samples"),
                                              "characteristic.samples");
        if (c.samples < 2)
          throw ConfigError("characteristic.samples must be at least 2");
      }
      spec.characteristics.push_back(std::move(c));
    }
  }
  return spec;
}

TPolicy parse_t_policy(const json& j) {
  check_keys(j, "t", {"policy", "value"});
  if (!j.contains("policy") || !j.at("policy").is_string())
    throw ConfigError("t.policy must be a string");
  const auto policy = j.at("policy").get<std::string>();
  if (policy == "closed_set_derived") {
    if (j.contains("value"))
      throw ConfigError("t.value is only valid with the fixed policy");
    return TPolicy::derived();
  }
  if (policy == "fixed") {
    if (!j.contains("value"))
      throw ConfigError("the fixed t policy needs t.value");
    return TPolicy::fixed(
        get_positive<std::size_t>(j.at("value"), "t.value"));
  }
  throw ConfigError("unknown t.policy '" + policy + "'");
}

Protocol parse_protocol(const json& j) {
  check_keys(j, "protocol",
             {"folds", "calibration_identities", "open_set_split"});
  Protocol p;
  if (j.contains("folds")) {
    p.folds = static_cast<int>(
        get_positive<std::uint32_t>(j.at("folds"), "protocol.folds"));
    if (p.folds < 2) throw ConfigError("protocol.folds must be at least 2");
  }
  if (j.contains("calibration_identities")) {
    p.calibration_identities = get_positive<std::size_t>(
        j.at("calibration_identities"), "protocol.calibration_identities");
    if (p.calibration_identities < 2)
      throw ConfigError("protocol.calibration_identities must be at least 2");
  }
  if (j.contains("open_set_split")) {
    if (!j.at("open_set_split").is_number())
      throw ConfigError("protocol.open_set_split must be a number");
    p.open_set_split = j.at("open_set_split").get<double>();
    if (!(p.open_set_split > 0.0) || !(p.open_set_split < 1.0))
      throw ConfigError("protocol.open_set_split must be inside (0, 1)");
  }
  return p;
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
  check_keys(j, "config",
             {"seed", "output_dir", "dataset", "synth", "characteristics",
              "schemes", "strategy", "k", "k_range", "t", "protocol",
              "search", "scenarios"});
  RunConfig cfg;

  if (j.contains("seed")) cfg.seed = get_seed(j.at("seed"), "seed");

  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string() ||
        j.at("output_dir").get<std::string>().empty())
      throw ConfigError("output_dir must be a non-empty string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }

  if (j.contains("dataset") && j.contains("synth"))
    throw ConfigError("dataset and synth are mutually exclusive");
  if (j.contains("dataset")) {
    if (!j.at("dataset").is_string())
      throw ConfigError("dataset must be a path string");
    cfg.dataset_path = j.at("dataset").get<std::string>();
  }
  if (j.contains("synth")) cfg.synth = parse_synth(j.at("synth"));

  if (j.contains("characteristics")) {
    if (!j.at("characteristics").is_array())
      throw ConfigError("characteristics must be an array of names");
    for (const auto& c : j.at("characteristics")) {
      if (!c.is_string())
        throw ConfigError("characteristics must be an array of names");
      cfg.characteristics.push_back(c.get<std::string>());
    }
    std::set<std::string> unique(cfg.characteristics.begin(),
                                 cfg.characteristics.end());
    if (unique.size() != cfg.characteristics.size())
      throw ConfigError("characteristics contains duplicates");
  }

  if (j.contains("schemes")) {
    if (!j.at("schemes").is_object())
      throw ConfigError("schemes must map characteristic names to objects");
    for (const auto& [name, spec] : j.at("schemes").items())
      cfg.schemes[name] = parse_scheme_spec(spec, "schemes." + name);
  }

  if (j.contains("strategy")) {
    if (!j.at("strategy").is_string())
      throw ConfigError("strategy must be a string");
    const auto s = j.at("strategy").get<std::string>();
    if (s == "exhaustive")
      cfg.exhaustive = true;
    else
      cfg.strategy = strategy_from_name(s);
  }

  if (j.contains("k") && j.contains("k_range"))
    throw ConfigError("k and k_range are mutually exclusive");
  const auto check_k = [](int k) {
    if (k < 1 || k > kMaxPatternBits)
      throw ConfigError("k must be in [1, " +
                        std::to_string(kMaxPatternBits) + "]");
  };
  if (j.contains("k")) {
    if (!is_nonneg_int(j.at("k")))
      throw ConfigError("k must be a positive integer");
    const int k = j.at("k").get<int>();
    check_k(k);
    cfg.ks = {k};
  }
  if (j.contains("k_range")) {
    const auto& r = j.at("k_range");
    if (!r.is_array() || r.size() != 2 || !is_nonneg_int(r[0]) ||
        !is_nonneg_int(r[1]))
      throw ConfigError("k_range must be [lo, hi]");
    const int lo = r[0].get<int>();
    const int hi = r[1].get<int>();
    check_k(lo);
    check_k(hi);
    if (lo > hi) throw ConfigError("k_range must satisfy lo <= hi");
    cfg.ks.clear();
    for (int k = lo; k <= hi; ++k) cfg.ks.push_back(k);
  }

  if (j.contains("t")) cfg.t_policy = parse_t_policy(j.at("t"));
  if (j.contains("protocol")) cfg.protocol = parse_protocol(j.at("protocol"));

  if (j.contains("search")) {
    check_keys(j.at("search"), "search", {"empty_bins_consume_budget"});
    if (j.at("search").contains("empty_bins_consume_budget")) {
      const auto& b = j.at("search").at("empty_bins_consume_budget");
      if (!b.is_boolean())
        throw ConfigError("search.empty_bins_consume_budget must be boolean");
      cfg.search.empty_bins_consume_budget = b.get<bool>();
    }
  }

  if (j.contains("scenarios")) {
    if (!j.at("scenarios").is_array() || j.at("scenarios").empty())
      throw ConfigError("scenarios must be a non-empty array");
    cfg.scenarios.clear();
    for (const auto& s : j.at("scenarios")) {
      if (!s.is_string() ||
          (s.get<std::string>() != "closed" && s.get<std::string>() != "open"))
        throw ConfigError("scenarios entries must be 'closed' or 'open'");
      cfg.scenarios.push_back(s.get<std::string>());
    }
    std::set<std::string> unique(cfg.scenarios.begin(), cfg.scenarios.end());
    if (unique.size() != cfg.scenarios.size())
      throw ConfigError("scenarios contains duplicates");
  }

  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return parse_run_config(j);
}

ResolvedRun resolve_run(const RunConfig& cfg, Exec exec) {
  ResolvedRun run;

  if (cfg.dataset_path) {
    run.dataset = load_dataset(*cfg.dataset_path);
  } else {
    SynthSpec spec = cfg.synth.value_or(default_synth_spec());
    spec.seed = rng::derive(cfg.seed, kSynthTag);
    run.dataset = generate(spec, exec);
  }
  validate(run.dataset);

  const auto ds_chars = run.dataset.characteristics();
  if (cfg.characteristics.empty()) {
    for (const auto& [name, dim] : ds_chars)
      run.characteristics.push_back(name);
  } else {
    run.characteristics = cfg.characteristics;
  }

  std::map<std::string, std::size_t> dims;
  for (const auto& [name, dim] : ds_chars) dims[name] = dim;

  for (const auto& name : run.characteristics) {
    const auto dim_it = dims.find(name);
    if (dim_it == dims.end())
      throw ConfigError("characteristic '" + name +
                        "' is not present in the data");
    SchemeSpec spec;
    if (const auto it = cfg.schemes.find(name); it != cfg.schemes.end())
      spec = it->second;
    SchemeConfig sc;
    sc.scheme = spec.scheme;
    sc.seed = spec.seed.value_or(
        rng::derive(cfg.seed, kSchemeTag, rng::fnv1a64(name)));
    sc.biohash_length = spec.length.value_or(dim_it->second);
    sc.iom_slots = spec.slots.value_or(512);
    sc.iom_projections = spec.projections.value_or(16);
    run.schemes[name] = sc;
  }
  for (const auto& [name, spec] : cfg.schemes) {
    if (std::find(run.characteristics.begin(), run.characteristics.end(),
                  name) == run.characteristics.end())
      throw ConfigError("scheme configured for unknown characteristic '" +
                        name + "'");
  }

  run.protocol = cfg.protocol;
  run.protocol.seed = rng::derive(cfg.seed, kProtocolTag);
  return run;
}

}  // namespace fbpindex
