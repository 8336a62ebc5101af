// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Cancelable template protection schemes.
//
// All schemes operate under a stolen-token assumption: one key per
// (scheme, characteristic) across the whole system, never per subject.
// Projection matrices are drawn from the seeded gaussian stream in rng.hpp,
// so a (seed, dimensions) pair pins the scheme output exactly.

#ifndef FBPINDEX_PROTECT_HPP_
#define FBPINDEX_PROTECT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbpindex/bitvec.hpp"
#include "fbpindex/errors.hpp"
#include "fbpindex/parallel.hpp"

namespace fbpindex {

using Embedding = std::vector<float>;

enum class Scheme { kSign, kBioHashing, kIomGrp };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

// Protected template.  bits is the indexable binary form for every scheme;
// for IoM-GRP the underlying integers are kept as well because comparison
// happens in integer space.
struct ProtectedTemplate {
  Scheme scheme = Scheme::kSign;
  BinaryTemplate bits;
  std::vector<std::uint16_t> ints;       // IoM-GRP only
  std::uint32_t iom_projections = 0;     // IoM-GRP only, q

  bool operator==(const ProtectedTemplate& o) const = default;
};

// Baseline: one bit per component, v >= 0 maps to 1.
BinaryTemplate sign_binarize(const Embedding& e);

// l seeded gaussian vectors in R^d, orthonormalized with modified
// Gram-Schmidt; a bit is the sign of the projection onto each.
class BioHashProjector {
 public:
  BioHashProjector(std::uint64_t seed, std::size_t dim, std::size_t length);
  // Uses the rows as given, skipping generation and orthonormalization.
  static BioHashProjector from_rows(std::vector<std::vector<double>> rows);

  BinaryTemplate apply(const Embedding& e) const;

  std::size_t dim() const { return dim_; }
  std::size_t length() const { return rows_.size(); }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

 private:
  BioHashProjector() = default;
  void orthonormalize();

  std::size_t dim_ = 0;
  std::vector<std::vector<double>> rows_;
};

// Index-of-maximum hashing with gaussian random projections: slot j stores
// the argmax over its q projections.  Equal maxima resolve to the lowest
// index; with gaussian rows that is a measure-zero event.
class IomProjector {
 public:
  IomProjector(std::uint64_t seed, std::size_t dim, std::size_t slots,
               std::uint32_t projections);
  static IomProjector from_rows(
      std::vector<std::vector<std::vector<double>>> slot_rows);

  std::vector<std::uint16_t> apply(const Embedding& e) const;

  std::size_t dim() const { return dim_; }
  std::size_t slots() const { return slot_rows_.size(); }
  std::uint32_t projections() const { return projections_; }

 private:
  IomProjector() = default;

  std::size_t dim_ = 0;
  std::uint32_t projections_ = 0;
  // [slot][projection][component]
  std::vector<std::vector<std::vector<double>>> slot_rows_;
};

// Fixed-width binary encoding of IoM integers: log2(q) bits per slot,
// big-endian within the slot.  q must be a power of two.
BinaryTemplate iom_encode(const std::vector<std::uint16_t>& ints,
                          std::uint32_t projections);

// Similarity in [0, 1]: normalized Hamming agreement for binary schemes,
// collision rate for IoM integers.  Throws DimensionError on scheme or
// length mismatch.
double similarity(const ProtectedTemplate& a, const ProtectedTemplate& b);

struct SchemeConfig {
  Scheme scheme = Scheme::kBioHashing;
  std::uint64_t seed = 0;
  std::size_t biohash_length = 512;
  std::size_t iom_slots = 512;
  std::uint32_t iom_projections = 16;

  bool operator==(const SchemeConfig& o) const = default;
};

// Bound instance of one scheme for one embedding dimension.
class Protector {
 public:
  Protector(const SchemeConfig& cfg, std::size_t dim);

  ProtectedTemplate operator()(const Embedding& e) const;

  // Length of the indexable binary form.
  std::size_t template_bits() const;
  const SchemeConfig& config() const { return cfg_; }

 private:
  SchemeConfig cfg_;
  std::size_t dim_ = 0;
  std::optional<BioHashProjector> bio_;
  std::optional<IomProjector> iom_;
};

// One-shot conveniences around Protector.
BinaryTemplate biohash(const Embedding& e, std::uint64_t seed,
                       std::size_t length);
std::vector<std::uint16_t> iom_grp(const Embedding& e, std::uint64_t seed,
                                   std::size_t slots,
                                   std::uint32_t projections);

// Batch kernel; out[i] = protector(in[i]).
std::vector<ProtectedTemplate> protect_batch(
    const std::vector<Embedding>& in, const Protector& protector, Exec exec);

}  // namespace fbpindex

#endif  // FBPINDEX_PROTECT_HPP_
