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

#include "rolesim/trace_filter.hpp"

#include "rolesim/error.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

namespace {

struct Hit {
  std::size_t pos = std::string_view::npos;
  const TraceMarker* marker = nullptr;
  bool is_close = false;
};

// Earliest open or close marker at or after `from`. On equal positions the
// longer token wins so overlapping markers resolve deterministically.
Hit next_marker(std::string_view text, std::size_t from,
                const TraceFilterConfig& config) {
  Hit best;
  auto consider = [&](std::size_t pos, const TraceMarker& m, bool is_close,
                      std::size_t len) {
    if (pos == std::string_view::npos) return;
    const std::size_t best_len =
        best.marker ? (best.is_close ? best.marker->close.size()
                                     : best.marker->open.size())
                    : 0;
    if (pos < best.pos || (pos == best.pos && len > best_len)) {
      best = Hit{pos, &m, is_close};
    }
  };
  for (const auto& m : config.markers) {
    if (!m.open.empty()) consider(text.find(m.open, from), m, false, m.open.size());
    if (!m.close.empty()) consider(text.find(m.close, from), m, true, m.close.size());
  }
  return best;
}

bool starts_with_sigil(std::string_view line, const TraceFilterConfig& config) {
  const std::string t = trim(line);
  for (const auto& sigil : config.line_sigils) {
    if (!sigil.empty() && t.rfind(sigil, 0) == 0) return true;
  }
  return false;
}

}  // namespace

std::string strip_reasoning_traces(std::string_view text,
                                   const TraceFilterConfig& config) {
  std::string kept;
  kept.reserve(text.size());
  std::size_t cursor = 0;
  while (cursor <= text.size()) {
    Hit hit = next_marker(text, cursor, config);
    if (hit.pos == std::string_view::npos) {
      kept.append(text.substr(cursor));
      break;
    }
    if (hit.is_close) {
      // Implicit trace: everything kept so far was reasoning.
      kept.clear();
      cursor = hit.pos + hit.marker->close.size();
      continue;
    }
    kept.append(text.substr(cursor, hit.pos - cursor));
    const std::size_t body = hit.pos + hit.marker->open.size();
    const std::size_t close = text.find(hit.marker->close, body);
    if (close == std::string_view::npos) {
      fail(ErrorCode::kUnterminatedTrace,
           "'" + hit.marker->open + "' at offset " + std::to_string(hit.pos) +
               " has no '" + hit.marker->close + "'");
    }
    kept.push_back(' ');
    cursor = close + hit.marker->close.size();
  }

  std::vector<std::string> lines;
  for (const auto& line : split_lines(kept)) {
    if (starts_with_sigil(line, config)) continue;
    std::string t = trim(line);
    if (!t.empty()) lines.push_back(std::move(t));
  }
  return join(lines, "\n");
}

bool is_trace_free(std::string_view text, const TraceFilterConfig& config) {
  for (const auto& m : config.markers) {
    if ((!m.open.empty() && contains(text, m.open)) ||
        (!m.close.empty() && contains(text, m.close))) {
      return false;
    }
  }
  for (const auto& line : split_lines(text)) {
    if (starts_with_sigil(line, config)) return false;
  }
  return true;
}

}  // namespace rolesim
