// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "fbpindex/protect.hpp"

#include <bit>
#include <cmath>

#include "fbpindex/rng.hpp"

namespace fbpindex {

namespace {

double dot(const std::vector<double>& row, const Embedding& e) {
  double s = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i)
    s += row[i] * static_cast<double>(e[i]);
  return s;
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": embedding has " +
                         std::to_string(got) + " components, expected " +
                         std::to_string(want));
}

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kSign:
      return "sign";
    case Scheme::kBioHashing:
      return "biohashing";
    case Scheme::kIomGrp:
      return "iom_grp";
  }
  throw ArgumentError("unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "sign") return Scheme::kSign;
  if (name == "biohashing") return Scheme::kBioHashing;
  if (name == "iom_grp") return Scheme::kIomGrp;
  throw ConfigError("unknown scheme '" + name + "'");
}

BinaryTemplate sign_binarize(const Embedding& e) {
  if (e.empty()) throw ArgumentError("cannot binarize an empty embedding");
  BinaryTemplate out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    out.set_bit(i, e[i] >= 0.0f);  // sign(0) counts as positive
  return out;
}

BioHashProjector::BioHashProjector(std::uint64_t seed, std::size_t dim,
                                   std::size_t length)
    : dim_(dim) {
  if (dim == 0) throw ArgumentError("projection dimension must be positive");
  if (length == 0 || length > dim)
    throw ArgumentError("hash length must be in [1, dim]; got " +
                        std::to_string(length) + " for dim " +
                        std::to_string(dim));
  rng::GaussianStream g(seed);
  rows_.assign(length, std::vector<double>(dim));
  for (auto& row : rows_)
    for (auto& x : row) x = g.next();
  orthonormalize();
}

BioHashProjector BioHashProjector::from_rows(
    std::vector<std::vector<double>> rows) {
  if (rows.empty() || rows.front().empty())
    throw ArgumentError("projector rows must be non-empty");
  BioHashProjector p;
  p.dim_ = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != p.dim_)
      throw DimensionError("projector rows have unequal lengths");
  p.rows_ = std::move(rows);
  return p;
}

void BioHashProjector::orthonormalize() {
  // Modified Gram-Schmidt.
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    auto& ri = rows_[i];
    for (std::size_t j = 0; j < i; ++j) {
      const auto& rj = rows_[j];
      double r = 0.0;
      for (std::size_t c = 0; c < dim_; ++c) r += ri[c] * rj[c];
      for (std::size_t c = 0; c < dim_; ++c) ri[c] -= r * rj[c];
    }
    double norm2 = 0.0;
    for (const double x : ri) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    if (!(norm > 1e-12))
      throw StateError("degenerate random basis during orthonormalization");
    for (double& x : ri) x /= norm;
  }
}

BinaryTemplate BioHashProjector::apply(const Embedding& e) const {
  require_dim(e.size(), dim_, "biohash");
  BinaryTemplate out(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i)
    out.set_bit(i, dot(rows_[i], e) >= 0.0);
  return out;
}

IomProjector::IomProjector(std::uint64_t seed, std::size_t dim,
                           std::size_t slots, std::uint32_t projections)
    : dim_(dim), projections_(projections) {
  if (dim == 0) throw ArgumentError("projection dimension must be positive");
  if (slots == 0) throw ArgumentError("slot count must be positive");
  if (projections < 2 || projections > 65535)
    throw ArgumentError("projections per slot must be in [2, 65535]");
  slot_rows_.resize(slots);
  for (std::size_t j = 0; j < slots; ++j) {
    rng::GaussianStream g(rng::derive(seed, j));
    slot_rows_[j].assign(projections, std::vector<double>(dim));
    for (auto& row : slot_rows_[j])
      for (auto& x : row) x = g.next();
  }
}

IomProjector IomProjector::from_rows(
    std::vector<std::vector<std::vector<double>>> slot_rows) {
  if (slot_rows.empty() || slot_rows.front().empty() ||
      slot_rows.front().front().empty())
    throw ArgumentError("projector rows must be non-empty");
  IomProjector p;
  p.dim_ = slot_rows.front().front().size();
  p.projections_ = static_cast<std::uint32_t>(slot_rows.front().size());
  for (const auto& slot : slot_rows) {
    if (slot.size() != p.projections_)
      throw DimensionError("slots have unequal projection counts");
    for (const auto& r : slot)
      if (r.size() != p.dim_)
        throw DimensionError("projector rows have unequal lengths");
  }
  p.slot_rows_ = std::move(slot_rows);
  return p;
}

std::vector<std::uint16_t> IomProjector::apply(const Embedding& e) const {
  require_dim(e.size(), dim_, "iom_grp");
  std::vector<std::uint16_t> out(slot_rows_.size());
  for (std::size_t j = 0; j < slot_rows_.size(); ++j) {
    const auto& slot = slot_rows_[j];
    std::size_t best = 0;
    double best_val = dot(slot[0], e);
    for (std::size_t r = 1; r < slot.size(); ++r) {
      const double v = dot(slot[r], e);
      if (v > best_val) {
        best_val = v;
        best = r;
      }
    }
    out[j] = static_cast<std::uint16_t>(best);
  }
  return out;
}

BinaryTemplate iom_encode(const std::vector<std::uint16_t>& ints,
                          std::uint32_t projections) {
  if (ints.empty()) throw ArgumentError("cannot encode an empty template");
  if (projections < 2 || !std::has_single_bit(projections))
    throw ArgumentError("projections per slot must be a power of two, got " +
                        std::to_string(projections));
  const int width = std::bit_width(projections - 1);
  BinaryTemplate out(ints.size() * static_cast<std::size_t>(width));
  std::size_t at = 0;
  for (const std::uint16_t v : ints) {
    if (v >= projections)
      throw ArgumentError("integer " + std::to_string(v) +
                          " out of range for " + std::to_string(projections) +
                          " projections");
    for (int b = width - 1; b >= 0; --b) out.set_bit(at++, (v >> b) & 1);
  }
  return out;
}

double similarity(const ProtectedTemplate& a, const ProtectedTemplate& b) {
  if (a.scheme != b.scheme)
    throw DimensionError("cannot compare templates of schemes " +
                         scheme_name(a.scheme) + " and " +
                         scheme_name(b.scheme));
  if (a.scheme == Scheme::kIomGrp) {
    if (a.ints.size() != b.ints.size() || a.ints.empty())
      throw DimensionError("integer templates have unequal slot counts");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < a.ints.size(); ++i)
      hits += (a.ints[i] == b.ints[i]);
    return static_cast<double>(hits) / static_cast<double>(a.ints.size());
  }
  if (a.bits.size() != b.bits.size() || a.bits.size() == 0)
    throw DimensionError("binary templates have unequal lengths");
  const std::size_t d = hamming_distance(a.bits, b.bits);
  return 1.0 - static_cast<double>(d) / static_cast<double>(a.bits.size());
}

Protector::Protector(const SchemeConfig& cfg, std::size_t dim)
    : cfg_(cfg), dim_(dim) {
  switch (cfg.scheme) {
    case Scheme::kSign:
      if (dim == 0) throw ArgumentError("dimension must be positive");
      break;
    case Scheme::kBioHashing:
      bio_.emplace(cfg.seed, dim, cfg.biohash_length);
      break;
    case Scheme::kIomGrp:
      if (!std::has_single_bit(cfg.iom_projections))
        throw ConfigError("iom projections must be a power of two");
      iom_.emplace(cfg.seed, dim, cfg.iom_slots, cfg.iom_projections);
      break;
  }
}

ProtectedTemplate Protector::operator()(const Embedding& e) const {
  require_dim(e.size(), dim_, "protect");
  ProtectedTemplate out;
  out.scheme = cfg_.scheme;
  switch (cfg_.scheme) {
    case Scheme::kSign:
      out.bits = sign_binarize(e);
      break;
    case Scheme::kBioHashing:
      out.bits = bio_->apply(e);
      break;
    case Scheme::kIomGrp:
      out.ints = iom_->apply(e);
      out.iom_projections = cfg_.iom_projections;
      out.bits = iom_encode(out.ints, cfg_.iom_projections);
      break;
  }
  return out;
}

std::size_t Protector::template_bits() const {
  switch (cfg_.scheme) {
    case Scheme::kSign:
      return dim_;
    case Scheme::kBioHashing:
      return cfg_.biohash_length;
    case Scheme::kIomGrp:
      return cfg_.iom_slots *
             static_cast<std::size_t>(std::bit_width(cfg_.iom_projections - 1));
  }
  throw StateError("unreachable");
}

BinaryTemplate biohash(const Embedding& e, std::uint64_t seed,
                       std::size_t length) {
  return BioHashProjector(seed, e.size(), length).apply(e);
}

std::vector<std::uint16_t> iom_grp(const Embedding& e, std::uint64_t seed,
                                   std::size_t slots,
                                   std::uint32_t projections) {
  return IomProjector(seed, e.size(), slots, projections).apply(e);
}

std::vector<ProtectedTemplate> protect_batch(const std::vector<Embedding>& in,
                                             const Protector& protector,
                                             Exec exec) {
  std::vector<ProtectedTemplate> out(in.size());
  par::for_each_index(in.size(), exec,
                      [&](std::size_t i) { out[i] = protector(in[i]); });
  return out;
}

}  // namespace fbpindex
