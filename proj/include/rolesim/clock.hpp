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

#include <chrono>
#include <mutex>

namespace rolesim {

class Clock {
 public:
  using time_point = std::chrono::system_clock::time_point;
  virtual ~Clock() = default;
  virtual time_point now() = 0;
};

class SystemClock final : public Clock {
 public:
  time_point now() override { return std::chrono::system_clock::now(); }
};

/// Deterministic clock: every call to now() advances by `step`. Gives
/// scripted runs byte-identical timestamps.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(time_point start = default_epoch(),
                        std::chrono::milliseconds step = std::chrono::seconds(1))
      : current_(start), step_(step) {}

  time_point now() override {
    std::lock_guard lock(mu_);
    auto t = current_;
    current_ += step_;
    return t;
  }

  static time_point default_epoch() {
    // 2025-01-01T00:00:00Z
    return time_point(std::chrono::seconds(1735689600));
  }

 private:
  std::mutex mu_;
  time_point current_;
  std::chrono::milliseconds step_;
};

}  // namespace rolesim
