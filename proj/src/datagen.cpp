// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "fbpindex/datagen.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "fbpindex/ioutil.hpp"
#include "fbpindex/rng.hpp"

namespace fbpindex {

namespace {

constexpr std::uint64_t kMeanTag = rng::fnv1a64("datagen.mean");
constexpr std::uint64_t kNoiseTag = rng::fnv1a64("datagen.noise");

constexpr char kPackedMagic[4] = {'F', 'B', 'P', 'D'};
constexpr std::uint32_t kPackedVersion = 1;

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (const char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string format_float(float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

float parse_float(std::string_view s, std::size_t line_no) {
  float v = 0.0f;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) +
                     ": invalid float value '" + std::string(s) + "'");
  return v;
}

void append_u32le(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_u64le(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t read_u64le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void split_fields(const std::string& line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.emplace_back(line.data() + start, i - start);
      start = i + 1;
    }
  }
}

}  // namespace

SynthSpec default_synth_spec() {
  SynthSpec s;
  s.seed = 1;
  s.identities = 1000;
  s.characteristics = {
      {"bcA", 512, 0.12, 2},
      {"bcB", 512, 0.20, 2},
      {"bcC", 512, 0.32, 2},
  };
  return s;
}

std::vector<std::pair<std::string, std::size_t>>
EmbeddingDataset::characteristics() const {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.characteristic).second)
      out.emplace_back(r.characteristic, r.values.size());
  }
  return out;
}

std::vector<std::string> EmbeddingDataset::subjects() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.subject_id).second) out.push_back(r.subject_id);
  }
  return out;
}

EmbeddingDataset generate(const SynthSpec& spec, Exec exec) {
  if (spec.identities == 0 || spec.identities > 999999)
    throw ArgumentError("identity count must be in [1, 999999]");
  if (spec.characteristics.empty())
    throw ArgumentError("at least one characteristic is required");
  std::unordered_set<std::string> names;
  std::size_t per_identity = 0;
  for (const auto& c : spec.characteristics) {
    if (!valid_name(c.name))
      throw ArgumentError("characteristic name '" + c.name +
                          "' must match [A-Za-z0-9_.-]+");
    if (!names.insert(c.name).second)
      throw ArgumentError("duplicate characteristic name '" + c.name + "'");
    if (c.dim == 0) throw ArgumentError("dimension must be positive");
    if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma))
      throw ArgumentError("sigma must be finite and non-negative");
    if (c.samples < 2)
      throw ArgumentError("at least two samples per instance are required");
    per_identity += c.samples;
  }

  EmbeddingDataset ds;
  ds.records.resize(spec.identities * per_identity);

  par::for_each_index(spec.identities, exec, [&](std::size_t id) {
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "id%06zu", id + 1);
    const std::string subject(idbuf);
    std::size_t at = id * per_identity;
    for (const auto& c : spec.characteristics) {
      const std::uint64_t ch = rng::fnv1a64(c.name);
      std::vector<double> mean(c.dim);
      rng::GaussianStream mg(rng::derive(spec.seed, kMeanTag, ch, id));
      for (auto& m : mean) m = mg.next();
      for (std::size_t s = 0; s < c.samples; ++s) {
        SampleRecord& rec = ds.records[at++];
        rec.subject_id = subject;
        rec.characteristic = c.name;
        rec.sample_id = static_cast<std::uint32_t>(s);
        rec.values.resize(c.dim);
        rng::GaussianStream ng(rng::derive(spec.seed, kNoiseTag, ch, id, s));
        for (std::size_t i = 0; i < c.dim; ++i)
          rec.values[i] = static_cast<float>(mean[i] + c.sigma * ng.next());
      }
    }
  });
  return ds;
}

void validate(const EmbeddingDataset& ds) {
  if (ds.records.empty()) throw DataError("dataset is empty");

  std::map<std::string, std::size_t> dims;
  // (subject, characteristic) -> sample ids
  std::map<std::pair<std::string, std::string>, std::set<std::uint32_t>> pairs;
  std::map<std::string, std::set<std::string>> subject_chars;

  for (const auto& r : ds.records) {
    if (!valid_name(r.subject_id) || !valid_name(r.characteristic))
      throw DataError("identifier '" + r.subject_id + "'/'" +
                      r.characteristic + "' must match [A-Za-z0-9_.-]+");
    const auto [it, fresh] = dims.emplace(r.characteristic, r.values.size());
    if (!fresh && it->second != r.values.size())
      throw DataError("characteristic '" + r.characteristic +
                      "' has inconsistent dimensions " +
                      std::to_string(it->second) + " and " +
                      std::to_string(r.values.size()));
    if (r.values.empty())
      throw DataError("empty embedding for subject '" + r.subject_id + "'");
    for (const float v : r.values) {
      if (!std::isfinite(v))
        throw DataError("non-finite value for subject '" + r.subject_id +
                        "', characteristic '" + r.characteristic + "'");
    }
    if (!pairs[{r.subject_id, r.characteristic}].insert(r.sample_id).second)
      throw DataError("duplicate sample " + std::to_string(r.sample_id) +
                      " for subject '" + r.subject_id +
                      "', characteristic '" + r.characteristic + "'");
    subject_chars[r.subject_id].insert(r.characteristic);
  }

  for (const auto& [key, samples] : pairs) {
    if (samples.size() < 2)
      throw DataError("subject '" + key.first + "', characteristic '" +
                      key.second + "' has fewer than two samples");
  }
  const std::size_t n_chars = dims.size();
  for (const auto& [subject, chars] : subject_chars) {
    if (chars.size() != n_chars)
      throw DataError("subject '" + subject + "' is missing " +
                      std::to_string(n_chars - chars.size()) +
                      " characteristic(s)");
  }
}

void save_csv(const EmbeddingDataset& ds, const std::string& path) {
  if (ds.records.empty()) throw DataError("dataset is empty");
  const std::size_t dim = ds.records.front().values.size();
  for (const auto& r : ds.records) {
    if (r.values.size() != dim)
      throw DataError(
          "the CSV form requires one dimension across characteristics");
    if (!valid_name(r.subject_id) || !valid_name(r.characteristic))
      throw DataError("identifier contains characters outside [A-Za-z0-9_.-]");
  }

  std::string out;
  out.reserve(ds.records.size() * (dim * 12 + 32));
  out += "subject_id,characteristic,sample_id";
  for (std::size_t i = 0; i < dim; ++i) {
    out += ",v";
    out += std::to_string(i);
  }
  out += '\n';
  for (const auto& r : ds.records) {
    out += r.subject_id;
    out += ',';
    out += r.characteristic;
    out += ',';
    out += std::to_string(r.sample_id);
    for (const float v : r.values) {
      out += ',';
      out += format_float(v);
    }
    out += '\n';
  }
  io::atomic_write_file(path, out);
}

EmbeddingDataset load_csv(const std::string& path) {
  const std::string text = io::read_file(path);
  EmbeddingDataset ds;
  std::vector<std::string_view> fields;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::size_t start = 0;
  bool header_seen = false;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;

    split_fields(line, fields);
    if (!header_seen) {
      if (fields.size() < 4 || fields[0] != "subject_id" ||
          fields[1] != "characteristic" || fields[2] != "sample_id")
        throw ParseError("line 1: bad header, expected "
                         "subject_id,characteristic,sample_id,v0..");
      dim = fields.size() - 3;
      for (std::size_t i = 0; i < dim; ++i) {
        if (fields[3 + i] != "v" + std::to_string(i))
          throw ParseError("line 1: value column " + std::to_string(i) +
                           " must be named v" + std::to_string(i));
      }
      header_seen = true;
      continue;
    }

    if (fields.size() != dim + 3)
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(dim + 3) + " fields, got " +
                       std::to_string(fields.size()));
    SampleRecord rec;
    rec.subject_id = std::string(fields[0]);
    rec.characteristic = std::string(fields[1]);
    if (!valid_name(rec.subject_id) || !valid_name(rec.characteristic))
      throw ParseError("line " + std::to_string(line_no) +
                       ": identifier must match [A-Za-z0-9_.-]+");
    std::uint32_t sid = 0;
    const auto res = std::from_chars(
        fields[2].data(), fields[2].data() + fields[2].size(), sid);
    if (res.ec != std::errc{} || res.ptr != fields[2].data() + fields[2].size())
      throw ParseError("line " + std::to_string(line_no) +
                       ": invalid sample_id '" + std::string(fields[2]) + "'");
    rec.sample_id = sid;
    rec.values.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i)
      rec.values.push_back(parse_float(fields[3 + i], line_no));
    ds.records.push_back(std::move(rec));
  }
  if (!header_seen) throw ParseError("file '" + path + "' is empty");
  if (ds.records.empty())
    throw ParseError("file '" + path + "' has a header but no rows");
  return ds;
}

void save_packed(const EmbeddingDataset& ds, const std::string& path) {
  if (ds.records.empty()) throw DataError("dataset is empty");

  nlohmann::ordered_json manifest;
  manifest["version"] = kPackedVersion;
  auto chars = nlohmann::ordered_json::array();
  for (const auto& [name, dim] : ds.characteristics())
    chars.push_back({{"name", name}, {"dim", dim}});
  manifest["characteristics"] = std::move(chars);
  auto recs = nlohmann::ordered_json::array();
  for (const auto& r : ds.records) {
    recs.push_back({{"subject", r.subject_id},
                    {"characteristic", r.characteristic},
                    {"sample", r.sample_id}});
  }
  manifest["records"] = std::move(recs);
  const std::string mtext = manifest.dump();

  std::string buf;
  buf.append(kPackedMagic, 4);
  append_u32le(buf, kPackedVersion);
  append_u64le(buf, mtext.size());
  buf += mtext;
  for (const auto& r : ds.records) {
    for (const float v : r.values)
      append_u32le(buf, std::bit_cast<std::uint32_t>(v));
  }
  io::atomic_write_file(path, buf);
}

EmbeddingDataset load_packed(const std::string& path) {
  const std::string buf = io::read_file(path);
  if (buf.size() < 16 || std::memcmp(buf.data(), kPackedMagic, 4) != 0)
    throw ParseError("'" + path + "' is not a packed embedding file");
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  const std::uint32_t version = read_u32le(p + 4);
  if (version != kPackedVersion)
    throw ParseError("unsupported packed version " + std::to_string(version));
  const std::uint64_t mlen = read_u64le(p + 8);
  if (16 + mlen > buf.size())
    throw ParseError("truncated manifest in '" + path + "'");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(buf.substr(16, mlen));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad manifest in '" + path + "': " + e.what());
  }

  std::unordered_map<std::string, std::size_t> dims;
  try {
    for (const auto& c : manifest.at("characteristics"))
      dims[c.at("name").get<std::string>()] = c.at("dim").get<std::size_t>();

    EmbeddingDataset ds;
    std::size_t offset = 16 + mlen;
    for (const auto& r : manifest.at("records")) {
      SampleRecord rec;
      rec.subject_id = r.at("subject").get<std::string>();
      rec.characteristic = r.at("characteristic").get<std::string>();
      rec.sample_id = r.at("sample").get<std::uint32_t>();
      const auto it = dims.find(rec.characteristic);
      if (it == dims.end())
        throw ParseError("record references unknown characteristic '" +
                         rec.characteristic + "'");
      const std::size_t dim = it->second;
      if (offset + 4 * dim > buf.size())
        throw ParseError("truncated payload in '" + path + "'");
      rec.values.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        rec.values[i] =
            std::bit_cast<float>(read_u32le(p + offset + 4 * i));
      }
      offset += 4 * dim;
      ds.records.push_back(std::move(rec));
    }
    if (offset != buf.size())
      throw ParseError("trailing bytes in '" + path + "'");
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad manifest in '" + path + "': " + e.what());
  }
}

void save_dataset(const EmbeddingDataset& ds, const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    save_csv(ds, path);
  else
    save_packed(ds, path);
}

EmbeddingDataset load_dataset(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    return load_csv(path);
  return load_packed(path);
}

}  // namespace fbpindex
