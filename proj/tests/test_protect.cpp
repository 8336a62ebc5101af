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

#include <cmath>
#include <cstdint>
#include <vector>

#include "fbpindex/protect.hpp"
#include "fbpindex/rng.hpp"

using namespace fbpindex;

namespace {

Embedding random_embedding(rng::Xoshiro256ss& g, std::size_t d) {
  Embedding e(d);
  for (auto& v : e)
    v = static_cast<float>(g.uniform01() * 2.0 - 1.0);
  return e;
}

}  // namespace

TEST_CASE("sign binarization keeps zero on the positive side") {
  CHECK(sign_binarize({0.5f, -0.2f, 0.0f}).to_string() == "101");
  CHECK(sign_binarize({-1.0f, -0.1f, -7.0f}).popcount() == 0);

  rng::Xoshiro256ss g(31);
  const auto e = random_embedding(g, 512);
  const auto t = sign_binarize(e);
  REQUIRE(t.size() == 512);
  for (std::size_t i = 0; i < e.size(); ++i)
    CHECK(t.bit(i) == (e[i] >= 0.0f));

  CHECK_THROWS_AS(sign_binarize({}), ArgumentError);
}

TEST_CASE("biohash rows come out orthonormal") {
  const BioHashProjector p(77, 48, 32);
  const auto& rows = p.rows();
  REQUIRE(rows.size() == 32);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a; b < rows.size(); ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < 48; ++i) dot += rows[a][i] * rows[b][i];
      if (a == b)
        CHECK(dot == doctest::Approx(1.0).epsilon(1e-9));
      else
        CHECK(std::abs(dot) < 1e-9);
    }
  }
}

TEST_CASE("biohash bits are the signs of the row projections") {
  rng::Xoshiro256ss g(78);
  const BioHashProjector p(12, 64, 40);
  const auto e = random_embedding(g, 64);
  const auto t = p.apply(e);
  REQUIRE(t.size() == 40);
  for (std::size_t r = 0; r < 40; ++r) {
    double dot = 0.0;
    for (std::size_t i = 0; i < 64; ++i)
      dot += p.rows()[r][i] * static_cast<double>(e[i]);
    CHECK(t.bit(r) == (dot >= 0.0));
  }
}

TEST_CASE("hand-fixed projection rows bypass the generator") {
  const auto p = BioHashProjector::from_rows(
      {{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}});
  CHECK(p.apply({0.3f, -0.7f, 0.1f, 0.9f}).to_string() == "10");
}

TEST_CASE("biohash is deterministic per key and spreads across keys") {
  rng::Xoshiro256ss g(5150);
  const std::size_t l = 128;
  const auto e = random_embedding(g, 160);
  CHECK(biohash(e, 400, l) == biohash(e, 400, l));

  // Independent keys behave like independent fair bits: hamming distance
  // concentrates at l/2 within a four-sigma band.
  const double band = 4.0 * std::sqrt(static_cast<double>(l)) / 2.0;
  for (int pair = 0; pair < 100; ++pair) {
    const auto a = biohash(e, 1000 + static_cast<std::uint64_t>(pair), l);
    const auto b = biohash(e, 2000 + static_cast<std::uint64_t>(pair), l);
    const auto hd = static_cast<double>(hamming_distance(a, b));
    CHECK(hd > 0.0);
    CHECK(std::abs(hd - static_cast<double>(l) / 2.0) <= band);
  }
}

TEST_CASE("biohash length bounds are validated") {
  CHECK_THROWS_AS(BioHashProjector(1, 0, 1), ArgumentError);
  CHECK_THROWS_AS(BioHashProjector(1, 8, 0), ArgumentError);
  CHECK_THROWS_AS(BioHashProjector(1, 8, 9), ArgumentError);
  CHECK_NOTHROW(BioHashProjector(1, 8, 8));
}

TEST_CASE("iom slot values are argmaxes over the slot projections") {
  // Two opposed projections: the positive one always wins.
  const auto p = IomProjector::from_rows(
      {{{1.0, 2.0, -1.0}, {-1.0, -2.0, 1.0}}});
  const auto ints = p.apply({0.5f, 1.0f, -0.25f});
  REQUIRE(ints.size() == 1);
  CHECK(ints[0] == 0);

  rng::Xoshiro256ss g(90);
  std::vector<std::vector<std::vector<double>>> rows(8);
  for (auto& slot : rows) {
    slot.resize(4);
    for (auto& row : slot) {
      row.resize(16);
      for (auto& v : row) v = g.uniform01() * 2.0 - 1.0;
    }
  }
  const auto q4 = IomProjector::from_rows(rows);
  const auto e = random_embedding(g, 16);
  const auto got = q4.apply(e);
  REQUIRE(got.size() == 8);
  for (std::size_t j = 0; j < 8; ++j) {
    double best = -1e300;
    std::uint16_t arg = 0;
    for (std::uint16_t r = 0; r < 4; ++r) {
      double dot = 0.0;
      for (std::size_t i = 0; i < 16; ++i)
        dot += rows[j][r][i] * static_cast<double>(e[i]);
      if (dot > best) {
        best = dot;
        arg = r;
      }
    }
    CHECK(got[j] == arg);
  }
}

TEST_CASE("iom hashing is deterministic and validates its bounds") {
  rng::Xoshiro256ss g(91);
  const auto e = random_embedding(g, 32);
  CHECK(iom_grp(e, 55, 16, 8) == iom_grp(e, 55, 16, 8));
  CHECK_THROWS_AS(IomProjector(1, 32, 16, 1), ArgumentError);
  CHECK_THROWS_AS(IomProjector(1, 32, 0, 4), ArgumentError);
  CHECK_THROWS_AS(IomProjector(1, 0, 16, 4), ArgumentError);
}

TEST_CASE("iom encoding packs big-endian fixed-width slots") {
  CHECK(iom_encode({5}, 16).to_string() == "0101");
  CHECK(iom_encode({1, 0, 3}, 4).to_string() == "010011");

  const std::vector<std::uint16_t> ints(512, 9);
  const auto t = iom_encode(ints, 16);
  CHECK(t.size() == 2048);

  // Decode oracle: reading the windows back must reproduce the integers.
  rng::Xoshiro256ss g(92);
  std::vector<std::uint16_t> rand_ints(100);
  for (auto& v : rand_ints) v = static_cast<std::uint16_t>(g.next() % 32);
  const auto enc = iom_encode(rand_ints, 32);
  REQUIRE(enc.size() == 500);
  for (std::size_t j = 0; j < rand_ints.size(); ++j)
    CHECK(enc.window(5 * j, 5) == rand_ints[j]);

  CHECK_THROWS_AS(iom_encode({0, 1}, 12), ArgumentError);  // not a power of 2
  CHECK_THROWS_AS(iom_encode({4}, 4), ArgumentError);      // value out of range
}

TEST_CASE("similarity is agreement for bits and collisions for integers") {
  ProtectedTemplate a;
  a.scheme = Scheme::kBioHashing;
  a.bits = BinaryTemplate::from_string("0000");
  ProtectedTemplate b = a;
  CHECK(similarity(a, b) == 1.0);
  b.bits = BinaryTemplate::from_string("0101");
  CHECK(similarity(a, b) == 0.5);

  ProtectedTemplate x;
  x.scheme = Scheme::kIomGrp;
  x.ints = {1, 2, 3, 4};
  x.iom_projections = 8;
  x.bits = iom_encode(x.ints, 8);
  ProtectedTemplate y = x;
  y.ints = {1, 2, 0, 0};
  y.bits = iom_encode(y.ints, 8);
  CHECK(similarity(x, y) == 0.5);

  ProtectedTemplate s;
  s.scheme = Scheme::kSign;
  s.bits = BinaryTemplate::from_string("0000");
  CHECK_THROWS_AS(similarity(a, s), DimensionError);
}

TEST_CASE("protector template widths follow the scheme") {
  SchemeConfig sign_cfg;
  sign_cfg.scheme = Scheme::kSign;
  CHECK(Protector(sign_cfg, 300).template_bits() == 300);

  SchemeConfig bio_cfg;
  bio_cfg.scheme = Scheme::kBioHashing;
  bio_cfg.seed = 3;
  bio_cfg.biohash_length = 256;
  CHECK(Protector(bio_cfg, 512).template_bits() == 256);

  SchemeConfig iom_cfg;
  iom_cfg.scheme = Scheme::kIomGrp;
  iom_cfg.seed = 4;
  iom_cfg.iom_slots = 512;
  iom_cfg.iom_projections = 16;
  const Protector p(iom_cfg, 64);
  CHECK(p.template_bits() == 2048);

  rng::Xoshiro256ss g(93);
  const auto tpl = p(random_embedding(g, 64));
  CHECK(tpl.bits.size() == 2048);
  CHECK(tpl.ints.size() == 512);
  CHECK(tpl.bits == iom_encode(tpl.ints, 16));
}

TEST_CASE("batch protection agrees between serial and parallel") {
  rng::Xoshiro256ss g(94);
  std::vector<Embedding> in;
  for (int i = 0; i < 64; ++i) in.push_back(random_embedding(g, 40));
  SchemeConfig cfg;
  cfg.scheme = Scheme::kBioHashing;
  cfg.seed = 10;
  cfg.biohash_length = 40;
  const Protector protector(cfg, 40);
  const auto serial = protect_batch(in, protector, Exec::kSerial);
  const auto parallel = protect_batch(in, protector, Exec::kParallel);
  REQUIRE(serial.size() == in.size());
  CHECK(serial == parallel);
  for (std::size_t i = 0; i < in.size(); ++i)
    CHECK(serial[i] == protector(in[i]));
}

TEST_CASE("scheme names round-trip") {
  for (const auto s :
       {Scheme::kSign, Scheme::kBioHashing, Scheme::kIomGrp})
    CHECK(scheme_from_name(scheme_name(s)) == s);
  CHECK_THROWS_AS(scheme_from_name("rot13"), ConfigError);
}
