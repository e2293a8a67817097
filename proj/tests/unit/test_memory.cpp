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

#include <doctest.h>

#include "rolesim/error.hpp"
#include "rolesim/memory.hpp"

using namespace rolesim;

namespace {

MemoryRecord rec(int round, std::string text, std::vector<double> v) {
  return MemoryRecord{round, "protagonist", std::move(text), std::move(v)};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("cosine similarity") {
  const std::vector<double> a{1, 0}, b{0, 1}, c{2, 0}, d{-1, 0};
  CHECK(cosine_similarity(a, b) == 0.0);
  CHECK(cosine_similarity(a, c) == 1.0);
  CHECK(cosine_similarity(a, d) == -1.0);
  const std::vector<double> zero{0, 0}, three{1, 2, 3};
  CHECK(code_of([&] { cosine_similarity(a, zero); }) == ErrorCode::kZeroVector);
  CHECK(code_of([&] { cosine_similarity(a, three); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("retrieval orders by similarity then round then insertion") {
  MemoryStore store;
  store.append(rec(3, "late twin", {1, 0}));
  store.append(rec(1, "early twin", {2, 0}));
  store.append(rec(2, "orthogonal", {0, 1}));
  store.append(rec(1, "diagonal", {1, 1}));
  store.append(rec(1, "early twin again", {3, 0}));
  const std::vector<double> q{1, 0};
  const auto top = retrieve(store, q, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].text == "early twin");
  CHECK(top[1].text == "early twin again");
  CHECK(top[2].text == "late twin");
  CHECK(retrieve(store, q, 99).size() == 5);
  CHECK(retrieve(store, q, 0).empty());
  CHECK(retrieve(MemoryStore{}, q, 3).empty());
}

TEST_CASE("store enforces one dimensionality") {
  MemoryStore store;
  store.append(rec(1, "a", {1, 0, 0}));
  CHECK(store.dim() == 3);
  CHECK(code_of([&] { store.append(rec(1, "b", {1, 0})); }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([&] { store.append(rec(1, "  ", {1, 0, 0})); }) == ErrorCode::kInvalidArgument);
  const std::vector<double> q{1, 0};
  CHECK(code_of([&] { retrieve(store, q, 1); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("records round-trip through json") {
  const auto r = rec(4, "text", {0.25, -0.5});
  CHECK(memory_record_from_json(to_json(r)) == r);
}
