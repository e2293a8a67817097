// Copyright 2026 The rolesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "rolesim/json_util.hpp"

namespace rolesim {

/// dot(a, b) / (|a| |b|), clamped to [-1, 1].
/// Throws DimensionMismatch for unequal or zero length, ZeroVector when
/// either input is all zeros.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct MemoryRecord {
  int round = 1;
  std::string author;
  std::string text;
  std::vector<double> embedding;

  bool operator==(const MemoryRecord&) const = default;
};

/// Append-only episodic store with exact retrieval.
class MemoryStore {
 public:
  explicit MemoryStore(std::size_t dim = 0) : dim_(dim) {}

  /// The first append fixes the dimensionality when it was left at 0.
  void append(MemoryRecord record);

  const std::vector<MemoryRecord>& records() const noexcept { return records_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

 private:
  std::vector<MemoryRecord> records_;
  std::size_t dim_;
};

inline constexpr std::size_t kDefaultRetrievalDepth = 5;

/// The min(k, size) most similar records, similarity descending, ties to
/// the lower round and then to insertion order.
std::vector<MemoryRecord> retrieve(const MemoryStore& store,
                                   std::span<const double> query, std::size_t k);

json to_json(const MemoryRecord& r);
MemoryRecord memory_record_from_json(const json& j);

}  // namespace rolesim
