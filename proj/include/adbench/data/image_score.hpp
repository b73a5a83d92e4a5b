// Copyright 2026 The adbench Authors.
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "adbench/data/types.hpp"
#include "adbench/error.hpp"

namespace adbench {

struct MaxScore {};
struct TopKMean {
  std::size_t k = 1;
};
using ImageScoreMode = std::variant<MaxScore, TopKMean>;

/// Reduces a pixel map to one image-level score. Defaults to the map maximum.
inline double derive_image_score(const ScoreMap& map, const ImageScoreMode& mode = MaxScore{}) {
  if (map.size() == 0) fail(ErrorCode::kInvalidArgument, "cannot derive an image score from an empty map");
  const auto& s = map.scores();
  if (std::holds_alternative<MaxScore>(mode)) return *std::max_element(s.begin(), s.end());
  const std::size_t k = std::get<TopKMean>(mode).k;
  if (k == 0) fail(ErrorCode::kInvalidArgument, "top-k mean needs k >= 1");
  if (k > s.size()) {
    fail(ErrorCode::kInvalidArgument,
         "top-k mean with k=" + std::to_string(k) + " exceeds pixel count " + std::to_string(s.size()));
  }
  std::vector<double> copy = s;
  std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(k - 1), copy.end(), std::greater<>());
  // The k largest now occupy [0, k); sort them so the sum order is fixed.
  std::sort(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(k), std::greater<>());
  const double sum = std::accumulate(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
  return sum / static_cast<double>(k);
}

/// Parses "max" or "topk:K".
inline ImageScoreMode parse_image_score_mode(const std::string& text) {
  if (text == "max") return MaxScore{};
  if (text.rfind("topk:", 0) == 0) {
    const std::string digits = text.substr(5);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      fail(ErrorCode::kInvalidArgument, "bad image-score mode '" + text + "'");
    }
    const auto k = static_cast<std::size_t>(std::stoull(digits));
    if (k == 0) fail(ErrorCode::kInvalidArgument, "top-k mean needs k >= 1");
    return TopKMean{k};
  }
  fail(ErrorCode::kInvalidArgument, "bad image-score mode '" + text + "' (expected max or topk:K)");
}

}  // namespace adbench
