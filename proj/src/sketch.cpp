// Copyright 2026 The fairkm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "fairkm/sketch.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "fairkm/errors.hpp"
#include "fairkm/random.hpp"

namespace fairkm {
namespace {

constexpr std::size_t kCacheLimit = std::size_t{1} << 20;
constexpr char kMagic[4] = {'F', 'K', 'M', 'S'};

bool positive(std::uint64_t seed, std::size_t row, std::size_t col) {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(row)) +
                                     static_cast<std::uint64_t>(col));
  return (h >> 63) == 0;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xff);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw DomainError("truncated sketch record");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return v;
}

StreamingCoresetBuilder::Options with_provenance(StreamingCoresetBuilder::Options options) {
  options.coreset.track_provenance = true;
  return options;
}

}  // namespace

Projection::Projection(std::size_t d, std::size_t m, std::uint64_t seed)
    : d_(d), m_(m), seed_(seed), scale_(m > 0 ? 1.0 / std::sqrt(static_cast<double>(m)) : 0.0) {
  if (m == 0) throw DomainError("projection dimension must be at least 1");
  if (d == 0) throw DomainError("input dimension must be at least 1");
  if (d * m <= kCacheLimit) {
    cache_.resize(d * m);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < m; ++c) cache_[r * m + c] = positive(seed, r, c) ? scale_ : -scale_;
    }
  }
}

double Projection::entry(std::size_t row, std::size_t col) const {
  if (!cache_.empty()) return cache_[row * m_ + col];
  return positive(seed_, row, col) ? scale_ : -scale_;
}

void Projection::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != d_ || out.size() != m_) throw DomainError("projection dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t r = 0; r < d_; ++r) {
    if (x[r] == 0.0) continue;
    for (std::size_t c = 0; c < m_; ++c) out[c] += x[r] * entry(r, c);
  }
}

std::vector<double> Projection::apply(std::span<const double> x) const {
  std::vector<double> out(m_);
  apply(x, out);
  return out;
}

Projection make_projection(std::size_t d, std::size_t m, std::uint64_t seed) { return Projection(d, m, seed); }

std::size_t default_sketch_dimension(std::size_t k, double epsilon) {
  if (k == 0) throw DomainError("k must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(4.0 * static_cast<double>(k) / (epsilon * epsilon)));
}

SketchState::SketchState(std::size_t d, int num_colors, std::size_t k, double epsilon, std::size_t m,
                         std::uint64_t seed, StreamingCoresetBuilder::Options options)
    : projection_(d, m, seed), builder_(m, num_colors, k, epsilon, with_provenance(options)), scratch_(m) {}

void SketchState::insert(std::span<const double> row, Color color) {
  if (row.size() != projection_.input_dim()) throw DomainError("row dimension differs from the sketch dimension");
  projection_.apply(row, scratch_);
  const Provenance provenance{1, std::vector<double>(row.begin(), row.end())};
  builder_.insert(scratch_, color, 1, &provenance);
  ++rows_;
}

void SketchState::insert_all(const Dataset& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Weight w = 0; w < rows.weight(i); ++w) insert(rows.point(i), rows.color(i));
  }
}

FairCoreset SketchState::summary() {
  FairCoreset out = builder_.finish();
  out.provenance_dim = projection_.input_dim();
  return out;
}

Centers recover_centers(const FairCoreset& sketch, const FairClustering& clustering) {
  const Dataset& summary = sketch.summary;
  if (sketch.provenance.size() != summary.size()) throw DomainError("sketch carries no provenance");
  if (clustering.assignment.size() != summary.size()) throw DomainError("clustering must cover every summary point");
  const std::size_t k = clustering.centers.size();
  const std::size_t d = sketch.provenance_dim;
  std::vector<double> sums(k * d, 0.0);
  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < summary.size(); ++i) {
    const auto& prov = sketch.provenance[i];
    const double w = static_cast<double>(summary.weight(i));
    for (const auto& part : clustering.assignment[i]) {
      if (part.center >= k) throw DomainError("assignment references an out-of-range center");
      const double share = static_cast<double>(part.weight) / w;
      counts[part.center] += share * static_cast<double>(prov.count);
      for (std::size_t j = 0; j < d; ++j) sums[part.center * d + j] += share * prov.linear_sum[j];
    }
  }
  Centers out(d);
  std::vector<double> mean(d);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] <= 0.0) throw DomainError("cannot recover the center of an empty cluster");
    for (std::size_t j = 0; j < d; ++j) mean[j] = sums[c * d + j] / counts[c];
    out.add(mean);
  }
  return out;
}

void write_sketch(std::ostream& out, const SketchRecord& record) {
  out.write(kMagic, 4);
  put_u64(out, 1);
  put_u64(out, record.seed);
  put_u64(out, record.m);
  write_coreset(out, record.coreset);
}

SketchRecord read_sketch(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw DomainError("not a sketch record");
  if (get_u64(in) != 1) throw DomainError("unsupported sketch record version");
  SketchRecord record;
  record.seed = get_u64(in);
  record.m = static_cast<std::size_t>(get_u64(in));
  record.coreset = read_coreset(in);
  if (record.coreset.summary.dim() != record.m && !record.coreset.summary.empty()) {
    throw DomainError("sketch record dimension disagrees with its header");
  }
  return record;
}

}  // namespace fairkm
