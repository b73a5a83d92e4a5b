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

// Scores a small in-memory category and prints the full metric record.
//
//   evaluate_maps [seed]

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>

#include "adbench/metrics/evaluate.hpp"

int main(int argc, char** argv) {
  using namespace adbench;
  const unsigned seed = argc > 1 ? static_cast<unsigned>(std::atoi(argv[1])) : 7;
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.2);

  constexpr std::size_t kH = 32, kW = 32;
  CategoryEvalSet set;
  set.category = "toy";
  for (int k = 0; k < 6; ++k) {
    EvalImage im;
    im.id = "img" + std::to_string(k);
    BinaryMask mask(kH, kW);
    if (k >= 3) {
      im.label = ImageLabel::kAnomalous;
      const std::size_t r0 = 4 + 5 * k % 20, c0 = 3 + 7 * k % 20;
      for (std::size_t r = r0; r < r0 + 6; ++r)
        for (std::size_t c = c0; c < c0 + 5; ++c) mask.set(r, c, true);
    }
    std::vector<double> scores(kH * kW);
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = (mask(i / kW, i % kW) ? 0.6 : 0.0) + noise(rng);
    im.map = ScoreMap(kH, kW, scores);
    im.mask = mask;
    set.images.push_back(std::move(im));
  }

  const MetricRecord r = evaluate_category(set);
  for (const auto& f : kMetricFields)
    std::cout << std::left << std::setw(12) << f.label << format_fixed(r.*f.member) << '\n';
  return 0;
}
