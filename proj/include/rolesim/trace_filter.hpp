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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rolesim {

struct TraceMarker {
  std::string open;
  std::string close;
};

/// Which spans of model output count as hidden reasoning. Different model
/// families use different delimiters, so both lists are configurable.
struct TraceFilterConfig {
  std::vector<TraceMarker> markers{{"<think>", "</think>"}};
  // Lines whose first non-blank characters are one of these are dropped.
  std::vector<std::string> line_sigils{"@@"};
};

/// Removes every delimited trace span and every sigil-prefixed line, then
/// rejoins the surviving text as trimmed, non-empty lines separated by a
/// single '\n'.
///
/// An open marker without a matching close marker throws UnterminatedTrace.
/// A close marker with no open marker before it ends an implicit trace that
/// started at the beginning of the text (reasoning models served with the
/// opening tag pre-filled emit exactly this shape).
///
/// Idempotent: strip(strip(x)) == strip(x).
std::string strip_reasoning_traces(std::string_view text,
                                   const TraceFilterConfig& config = {});

/// True when `text` contains no marker and no sigil line, i.e. it is a fixed
/// point of strip_reasoning_traces.
bool is_trace_free(std::string_view text, const TraceFilterConfig& config = {});

}  // namespace rolesim
