// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "fbpindex/report.hpp"

#include <cmath>
#include <cstdio>

#include "fbpindex/ioutil.hpp"

namespace fbpindex {

namespace {

std::string join_plus(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += '+';
    out += p;
  }
  return out;
}

nlohmann::ordered_json det_to_json(const std::vector<DetPoint>& det) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : det) {
    nlohmann::ordered_json pj;
    if (std::isinf(p.threshold))
      pj["threshold"] = p.threshold < 0 ? "-inf" : "inf";
    else
      pj["threshold"] = p.threshold;
    pj["fpir"] = p.fpir;
    pj["fnir"] = p.fnir;
    arr.push_back(std::move(pj));
  }
  return arr;
}

}  // namespace

std::string format_fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

nlohmann::ordered_json report_to_json(const EvalReport& rep) {
  const bool open = rep.scenario == "open";
  nlohmann::ordered_json j;
  j["scenario"] = rep.scenario;
  j["strategy"] = rep.strategy;
  j["schemes"] = rep.schemes;
  j["characteristics"] = rep.characteristics;
  if (rep.k > 0) j["k"] = rep.k;
  if (rep.t > 0) j["t"] = rep.t;
  j["folds"] = rep.folds;
  j["identities"] = rep.identities;
  j["mean_comparisons"] = rep.mean_comparisons;
  j["std_comparisons"] = rep.std_comparisons;
  j["mean_bins_visited"] = rep.mean_bins;
  j["std_bins_visited"] = rep.std_bins;
  if (!open) {
    j["hit_rate"] = rep.hit_rate;
    j["w_l"] = rep.w_l;
    j["w_u"] = rep.w_u;
  } else {
    j["w_open"] = rep.w_open;
    if (rep.fnir_at_fpir_1pct >= 0.0)
      j["fnir_at_fpir_0.01"] = rep.fnir_at_fpir_1pct;
    if (rep.fnir_at_fpir_10pct >= 0.0)
      j["fnir_at_fpir_0.1"] = rep.fnir_at_fpir_10pct;
  }

  auto folds = nlohmann::ordered_json::array();
  for (const auto& fm : rep.fold_metrics) {
    nlohmann::ordered_json fj;
    fj["fold"] = fm.fold;
    fj["enrolled"] = fm.enrolled;
    fj["probes"] = fm.probes;
    fj["mean_comparisons"] = fm.mean_comparisons;
    fj["std_comparisons"] = fm.std_comparisons;
    fj["mean_bins_visited"] = fm.mean_bins;
    fj["std_bins_visited"] = fm.std_bins;
    if (!open) {
      fj["hit_rate"] = fm.hit_rate;
      fj["w_l"] = fm.w_l;
      fj["w_u"] = fm.w_u;
    } else {
      fj["w_open"] = fm.w_open;
    }
    folds.push_back(std::move(fj));
  }
  j["fold_metrics"] = std::move(folds);
  if (open) j["det"] = det_to_json(rep.det);
  return j;
}

nlohmann::ordered_json reports_to_json(const std::vector<EvalReport>& reps) {
  nlohmann::ordered_json j;
  j["format"] = "fbpindex.report";
  j["version"] = 1;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& rep : reps) arr.push_back(report_to_json(rep));
  j["reports"] = std::move(arr);
  return j;
}

std::string reports_to_csv(const std::vector<EvalReport>& reps) {
  std::string out =
      "scenario,strategy,schemes,characteristics,k,t,folds,identities,"
      "hit_rate_pct,mean_comparisons,std_comparisons,mean_bins_visited,"
      "std_bins_visited,w_l_pct,w_u_pct,w_open_pct,fnir_at_fpir_0.01_pct,"
      "fnir_at_fpir_0.1_pct\n";
  for (const auto& rep : reps) {
    const bool open = rep.scenario == "open";
    out += rep.scenario;
    out += ',';
    out += rep.strategy;
    out += ',';
    out += rep.schemes;
    out += ',';
    out += join_plus(rep.characteristics);
    out += ',';
    if (rep.k > 0) out += std::to_string(rep.k);
    out += ',';
    if (rep.t > 0) out += std::to_string(rep.t);
    out += ',';
    out += std::to_string(rep.folds);
    out += ',';
    out += std::to_string(rep.identities);
    out += ',';
    if (!open) out += format_fixed2(rep.hit_rate * 100.0);
    out += ',';
    out += format_fixed2(rep.mean_comparisons);
    out += ',';
    out += format_fixed2(rep.std_comparisons);
    out += ',';
    out += format_fixed2(rep.mean_bins);
    out += ',';
    out += format_fixed2(rep.std_bins);
    out += ',';
    if (!open) out += format_fixed2(rep.w_l * 100.0);
    out += ',';
    if (!open) out += format_fixed2(rep.w_u * 100.0);
    out += ',';
    if (open) out += format_fixed2(rep.w_open * 100.0);
    out += ',';
    if (open && rep.fnir_at_fpir_1pct >= 0.0)
      out += format_fixed2(rep.fnir_at_fpir_1pct * 100.0);
    out += ',';
    if (open && rep.fnir_at_fpir_10pct >= 0.0)
      out += format_fixed2(rep.fnir_at_fpir_10pct * 100.0);
    out += '\n';
  }
  return out;
}

void write_reports(const std::vector<EvalReport>& reps,
                   const std::string& dir) {
  io::atomic_write_file(dir + "/report.json",
                        reports_to_json(reps).dump(2) + "\n");
  io::atomic_write_file(dir + "/report.csv", reports_to_csv(reps));
}

}  // namespace fbpindex
