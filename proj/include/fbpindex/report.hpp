// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Report serialization.
//
// JSON carries raw fractions at full precision; the CSV mirrors them as
// fixed two-decimal percentages (workload, rates) and two-decimal counts.
// Both writers are deterministic: equal reports give equal bytes.

#ifndef FBPINDEX_REPORT_HPP_
#define FBPINDEX_REPORT_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "fbpindex/evalbench.hpp"

namespace fbpindex {

// Fixed two-decimal formatting, the only number format the CSV uses.
std::string format_fixed2(double v);

nlohmann::ordered_json report_to_json(const EvalReport& rep);
nlohmann::ordered_json reports_to_json(const std::vector<EvalReport>& reps);
std::string reports_to_csv(const std::vector<EvalReport>& reps);

// Writes report.json and report.csv into the directory (atomically).
void write_reports(const std::vector<EvalReport>& reps,
                   const std::string& dir);

}  // namespace fbpindex

#endif  // FBPINDEX_REPORT_HPP_
