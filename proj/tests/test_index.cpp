// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "fbpindex/index.hpp"
#include "fbpindex/rng.hpp"

using namespace fbpindex;

namespace {

ProtectedTemplate sign_template(const std::string& bits) {
  ProtectedTemplate t;
  t.scheme = Scheme::kSign;
  t.bits = BinaryTemplate::from_string(bits);
  return t;
}

std::string repeat(const std::string& unit, std::size_t times) {
  std::string out;
  for (std::size_t i = 0; i < times; ++i) out += unit;
  return out;
}

ProtectedTemplate random_template(rng::Xoshiro256ss& g, std::size_t n) {
  std::string bits(n, '0');
  for (auto& c : bits) c = (g.next() & 1) ? '1' : '0';
  return sign_template(bits);
}

std::vector<EnrolRecord> random_records(rng::Xoshiro256ss& g, std::size_t n,
                                        std::size_t chars, std::size_t bits) {
  std::vector<EnrolRecord> recs(n);
  for (std::size_t i = 0; i < n; ++i) {
    recs[i].subject_id = "s" + std::to_string(i);
    for (std::size_t c = 0; c < chars; ++c)
      recs[i].templates.push_back(random_template(g, bits));
  }
  return recs;
}

std::vector<std::string> char_names(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < m; ++c)
    names.push_back("c" + std::to_string(c));
  return names;
}

}  // namespace

TEST_CASE("one characteristic reduces every strategy to the top pattern") {
  rng::Xoshiro256ss g(17);
  for (int it = 0; it < 50; ++it) {
    EnrolRecord rec;
    rec.subject_id = "x";
    rec.templates = {random_template(g, 40)};
    const auto want = top_pattern(extract_patterns(rec.templates[0].bits, 4));
    for (const auto strategy :
         {Strategy::kFeatureConcat, Strategy::kRankedCodes,
          Strategy::kXorCodes})
      CHECK(assign_bin(rec, strategy, 4) == want);
  }
}

TEST_CASE("xor fusion combines the per-characteristic top patterns") {
  EnrolRecord rec;
  rec.subject_id = "x";
  rec.templates = {sign_template("101101101"), sign_template("011011011")};
  // Premises: the tops are 101 and 011.
  CHECK(top_pattern(extract_patterns(rec.templates[0].bits, 3)) ==
        make_pattern(0b101, 3));
  CHECK(top_pattern(extract_patterns(rec.templates[1].bits, 3)) ==
        make_pattern(0b011, 3));
  CHECK(assign_bin(rec, Strategy::kXorCodes, 3) == make_pattern(0b110, 3));
}

TEST_CASE("three-way xor fusion folds over all characteristics") {
  EnrolRecord rec;
  rec.subject_id = "x";
  rec.templates = {sign_template("101101101"), sign_template("011011011"),
                   sign_template("110110110")};
  CHECK(top_pattern(extract_patterns(rec.templates[2].bits, 3)) ==
        make_pattern(0b110, 3));
  // 101 ^ 011 ^ 110 = 000.
  CHECK(assign_bin(rec, Strategy::kXorCodes, 3) == make_pattern(0, 3));
}

TEST_CASE("ranked fusion takes the globally best pattern") {
  EnrolRecord rec;
  rec.subject_id = "x";
  // 0110 repeated 9 times: top (0110, 9).  The second template is padded to
  // the same 36 bits; its top keeps a lower count.
  rec.templates = {sign_template(repeat("0110", 9)),
                   sign_template(repeat("1000", 7) + "11111111")};
  const auto top_a = extract_patterns(rec.templates[0].bits, 4);
  const auto top_b = extract_patterns(rec.templates[1].bits, 4);
  CHECK(top_a.entries.front().pattern == make_pattern(0b0110, 4));
  CHECK(top_a.entries.front().count == 9);
  CHECK(top_b.entries.front().count < 9);
  CHECK(assign_bin(rec, Strategy::kRankedCodes, 4) ==
        make_pattern(0b0110, 4));
}

TEST_CASE("ranked fusion equals the best of the per-characteristic tops") {
  // The global (count desc, value asc) maximum over merged lists is always
  // one of the per-characteristic tops; both readings must agree.
  rng::Xoshiro256ss g(18);
  for (int it = 0; it < 200; ++it) {
    EnrolRecord rec;
    rec.subject_id = "x";
    const std::size_t m = 1 + g.next() % 3;
    for (std::size_t c = 0; c < m; ++c)
      rec.templates.push_back(random_template(g, 48));
    const int k = 3 + static_cast<int>(g.next() % 3);

    PatternCount best;
    bool first = true;
    for (const auto& t : rec.templates) {
      for (const auto& e : extract_patterns(t.bits, k).entries) {
        const bool wins =
            first || e.count > best.count ||
            (e.count == best.count && e.pattern.value < best.pattern.value);
        if (wins) best = e;
        first = false;
      }
    }
    CHECK(assign_bin(rec, Strategy::kRankedCodes, k) == best.pattern);
  }
}

TEST_CASE("equal-length requirement applies to ranked and xor only") {
  rng::Xoshiro256ss g(16);
  EnrolRecord rec;
  rec.subject_id = "x";
  rec.templates = {random_template(g, 32), random_template(g, 16)};
  CHECK_THROWS_AS(assign_bin(rec, Strategy::kRankedCodes, 3), DimensionError);
  CHECK_THROWS_AS(assign_bin(rec, Strategy::kXorCodes, 3), DimensionError);
  CHECK_NOTHROW(assign_bin(rec, Strategy::kFeatureConcat, 3));
}

TEST_CASE("a single enrolment gives a single bin") {
  rng::Xoshiro256ss g(19);
  auto table = BinTable::build(random_records(g, 1, 2, 32),
                               Strategy::kFeatureConcat, 4, char_names(2));
  CHECK(table.size() == 1);
  CHECK(table.bin_count() == 1);
  const auto stats = table.occupancy_stats();
  CHECK(stats.sizes == std::vector<std::uint32_t>{1});
  CHECK(stats.mean == 1.0);
  CHECK(stats.stddev == 0.0);
}

TEST_CASE("identical templates pile into one bin") {
  rng::Xoshiro256ss g(20);
  const auto proto = random_template(g, 40);
  std::vector<EnrolRecord> recs(25);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].subject_id = "s" + std::to_string(i);
    recs[i].templates = {proto};
  }
  const auto table =
      BinTable::build(recs, Strategy::kRankedCodes, 5, char_names(1));
  CHECK(table.bin_count() == 1);
  CHECK(table.occupancy_stats().max == 25);
}

TEST_CASE("bins partition the enrolled subjects") {
  rng::Xoshiro256ss g(21);
  const auto table = BinTable::build(random_records(g, 200, 2, 64),
                                     Strategy::kFeatureConcat, 5,
                                     char_names(2));
  const auto stats = table.occupancy_stats();
  CHECK(std::accumulate(stats.sizes.begin(), stats.sizes.end(), 0u) == 200);

  std::set<std::uint32_t> seen;
  for (std::uint64_t v = 0; v < 32; ++v) {
    const auto* members = table.bin(Pattern{v, 5});
    if (!members) continue;
    for (const auto idx : *members) CHECK(seen.insert(idx).second);
  }
  CHECK(seen.size() == 200);

  // Every record's assigned pattern leads back to its own bin.
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto* members = table.bin(table.assigned_pattern(i));
    REQUIRE(members != nullptr);
    CHECK(std::count(members->begin(), members->end(),
                     static_cast<std::uint32_t>(i)) == 1);
  }
}

TEST_CASE("occupancy statistics are plain population moments") {
  // Two bins of sizes 3 and 5 from handcrafted constant templates.
  std::vector<EnrolRecord> recs;
  for (int i = 0; i < 3; ++i) {
    EnrolRecord r;
    r.subject_id = "a" + std::to_string(i);
    r.templates = {sign_template("000000")};
    recs.push_back(r);
  }
  for (int i = 0; i < 5; ++i) {
    EnrolRecord r;
    r.subject_id = "b" + std::to_string(i);
    r.templates = {sign_template("111111")};
    recs.push_back(r);
  }
  const auto table =
      BinTable::build(recs, Strategy::kFeatureConcat, 2, char_names(1));
  const auto stats = table.occupancy_stats();
  REQUIRE(stats.sizes.size() == 2);
  CHECK(stats.sizes[0] == 3);  // pattern 00 sorts first
  CHECK(stats.sizes[1] == 5);
  CHECK(stats.mean == 4.0);
  CHECK(stats.stddev == 1.0);
  CHECK(stats.max == 5);
}

TEST_CASE("duplicate subjects are rejected") {
  rng::Xoshiro256ss g(22);
  auto recs = random_records(g, 4, 1, 32);
  recs[3].subject_id = recs[0].subject_id;
  CHECK_THROWS_AS(
      BinTable::build(recs, Strategy::kFeatureConcat, 4, char_names(1)),
      EnrollmentError);
}

TEST_CASE("template shapes must be uniform per characteristic") {
  rng::Xoshiro256ss g(23);
  auto recs = random_records(g, 4, 2, 32);
  recs[2].templates[1] = random_template(g, 16);
  CHECK_THROWS_AS(
      BinTable::build(recs, Strategy::kFeatureConcat, 4, char_names(2)),
      DimensionError);

  recs = random_records(g, 4, 2, 32);
  recs[1].templates.pop_back();
  CHECK_THROWS_AS(
      BinTable::build(recs, Strategy::kFeatureConcat, 4, char_names(2)),
      DimensionError);
}

TEST_CASE("serial and parallel builds are identical") {
  rng::Xoshiro256ss g(24);
  const auto recs = random_records(g, 120, 3, 48);
  const auto a = BinTable::build(recs, Strategy::kXorCodes, 5, char_names(3),
                                 Exec::kSerial);
  const auto b = BinTable::build(recs, Strategy::kXorCodes, 5, char_names(3),
                                 Exec::kParallel);
  CHECK(a == b);
}

TEST_CASE("tables round-trip through json and disk") {
  rng::Xoshiro256ss g(25);
  auto recs = random_records(g, 30, 2, 40);
  // Mix in an integer-coded scheme to exercise both template forms.
  for (auto& r : recs) {
    ProtectedTemplate iom;
    iom.scheme = Scheme::kIomGrp;
    iom.iom_projections = 4;
    iom.ints = {static_cast<std::uint16_t>(g.next() % 4),
                static_cast<std::uint16_t>(g.next() % 4)};
    iom.bits = iom_encode(iom.ints, 4);
    r.templates[1] = iom;
  }
  const auto table =
      BinTable::build(recs, Strategy::kFeatureConcat, 4, char_names(2));

  const auto back = BinTable::from_json(table.to_json());
  CHECK(back == table);

  const auto dir = std::filesystem::temp_directory_path() /
                   ("fbpindex_index_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto path = (dir / "table.json").string();
  table.save(path);
  CHECK(BinTable::load(path) == table);
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupted serialized tables are rejected") {
  rng::Xoshiro256ss g(26);
  const auto table = BinTable::build(random_records(g, 5, 1, 32),
                                     Strategy::kFeatureConcat, 4,
                                     char_names(1));
  auto j = table.to_json();
  j["subjects"][0]["bin"] = 16;  // outside 2^4
  CHECK_THROWS_AS(BinTable::from_json(j), ParseError);

  auto j2 = table.to_json();
  j2["k"] = 99;
  CHECK_THROWS_AS(BinTable::from_json(j2), ParseError);
}

TEST_CASE("strategy names round-trip") {
  for (const auto s : {Strategy::kFeatureConcat, Strategy::kRankedCodes,
                       Strategy::kXorCodes})
    CHECK(strategy_from_name(strategy_name(s)) == s);
  CHECK_THROWS_AS(strategy_from_name("sorted_codes"), ConfigError);
}
