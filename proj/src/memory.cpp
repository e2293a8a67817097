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

#include "rolesim/memory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rolesim/error.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    fail(ErrorCode::kDimensionMismatch, "cosine over dimensions " +
                                            std::to_string(a.size()) + " and " +
                                            std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::kZeroVector, "cosine of a zero vector");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

void MemoryStore::append(MemoryRecord record) {
  require(!is_blank(record.text), "memory record text is empty");
  require(record.round >= 1, "memory record round must be >= 1");
  if (dim_ == 0 && records_.empty()) dim_ = record.embedding.size();
  if (record.embedding.size() != dim_ || dim_ == 0) {
    fail(ErrorCode::kDimensionMismatch,
         "memory record of dimension " + std::to_string(record.embedding.size()) +
             " in a store of dimension " + std::to_string(dim_));
  }
  records_.push_back(std::move(record));
}

std::vector<MemoryRecord> retrieve(const MemoryStore& store,
                                   std::span<const double> query, std::size_t k) {
  if (store.empty() || k == 0) return {};
  if (query.size() != store.dim()) {
    fail(ErrorCode::kDimensionMismatch, "query of dimension " +
                                            std::to_string(query.size()) +
                                            " against store of dimension " +
                                            std::to_string(store.dim()));
  }
  const auto& records = store.records();
  std::vector<double> score(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    score[i] = cosine_similarity(query, records[i].embedding);
  }
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, records.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end(), [&](std::size_t x, std::size_t y) {
                      if (score[x] != score[y]) return score[x] > score[y];
                      if (records[x].round != records[y].round) {
                        return records[x].round < records[y].round;
                      }
                      return x < y;
                    });
  std::vector<MemoryRecord> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(records[order[i]]);
  return out;
}

json to_json(const MemoryRecord& r) {
  return json{{"round", r.round}, {"author", r.author}, {"text", r.text},
              {"embedding", r.embedding}};
}

MemoryRecord memory_record_from_json(const json& j) {
  MemoryRecord r;
  r.round = j.at("round").get<int>();
  r.author = j.at("author").get<std::string>();
  r.text = j.at("text").get<std::string>();
  r.embedding = j.at("embedding").get<std::vector<double>>();
  return r;
}

}  // namespace rolesim
