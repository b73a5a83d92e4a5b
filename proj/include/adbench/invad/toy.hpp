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

// Seeded striped-texture category with square intensity defects, and an
// end-to-end train/infer/evaluate run on it.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "adbench/data/types.hpp"
#include "adbench/invad/train.hpp"
#include "adbench/metrics/evaluate.hpp"

namespace adbench::invad {

struct ToyDataOptions {
  std::size_t size = 32;
  std::size_t train_count = 64;
  std::size_t test_count = 16;
  std::size_t anomalous_count = 8;
  std::size_t min_defect = 6, max_defect = 10;
  double noise = 0.03;
};

struct ToyData {
  Tensor4 train;
  Tensor4 test;
  std::vector<BinaryMask> masks;  // per test image
  std::vector<ImageLabel> labels;
};

namespace detail {

inline void draw_texture(std::mt19937_64& rng, const ToyDataOptions& o,
                         Tensor4& out, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, o.noise);
  const double angle = 0.35 + 0.1 * (unit(rng) - 0.5);
  const double period = 6.0 + unit(rng) - 0.5;
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  const double tint[3] = {1.0, 0.75, 0.5};
  const double ca = std::cos(angle), sa = std::sin(angle);
  for (std::size_t y = 0; y < o.size; ++y)
    for (std::size_t x = 0; x < o.size; ++x) {
      const double u = (static_cast<double>(x) * ca + static_cast<double>(y) * sa);
      const double v = 0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * u / period + phase);
      for (std::size_t c = 0; c < out.c(); ++c)
        out(n, c, y, x) = tint[c % 3] * v + noise(rng);
    }
}

}  // namespace detail

/// Deterministic for a given seed.
inline ToyData make_toy_data(std::uint64_t seed, const ToyDataOptions& o = {}) {
  if (o.anomalous_count > o.test_count || o.min_defect > o.max_defect ||
      o.max_defect > o.size || o.min_defect == 0)
    throw Error(ErrorCode::kInvalidArgument, "inconsistent toy data options");
  std::mt19937_64 rng(seed);
  ToyData d;
  d.train = Tensor4(o.train_count, 3, o.size, o.size);
  d.test = Tensor4(o.test_count, 3, o.size, o.size);
  for (std::size_t n = 0; n < o.train_count; ++n) detail::draw_texture(rng, o, d.train, n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, o.noise);
  for (std::size_t n = 0; n < o.test_count; ++n) {
    detail::draw_texture(rng, o, d.test, n);
    BinaryMask mask(o.size, o.size);
    const bool anomalous = n >= o.test_count - o.anomalous_count;
    if (anomalous) {
      std::uniform_int_distribution<std::size_t> side(o.min_defect, o.max_defect);
      const std::size_t s = side(rng);
      std::uniform_int_distribution<std::size_t> pos(0, o.size - s);
      const std::size_t y0 = pos(rng), x0 = pos(rng);
      const double level = unit(rng) < 0.5 ? 0.05 : 0.95;
      for (std::size_t y = y0; y < y0 + s; ++y)
        for (std::size_t x = x0; x < x0 + s; ++x) {
          mask.set(y, x, true);
          for (std::size_t c = 0; c < 3; ++c) d.test(n, c, y, x) = level + noise(rng);
        }
    }
    d.masks.push_back(std::move(mask));
    d.labels.push_back(anomalous ? ImageLabel::kAnomalous : ImageLabel::kNormal);
  }
  return d;
}

struct ToyRunOptions {
  PipelineConfig config;
  ToyDataOptions data;
  std::size_t epochs = 40;
  std::size_t batch = 8;
  AdamWOptions optimizer;
  std::size_t workers = 1;
  StageReduce reduce = StageReduce::kMean;
};

struct ToyRun {
  MetricRecord record;
  CategoryEvalSet eval;  // raw anomaly maps with masks
  std::vector<double> epoch_loss;
};

/// Trains on normal images only, then scores the test split.
inline ToyRun toy_train_detect(std::uint64_t seed, const ToyRunOptions& o = {}) {
  const ToyData data = make_toy_data(seed, o.data);
  InvadState st = init_state(o.config, seed, o.data.size, o.data.size);
  ToyRun run;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(data.train.n());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t e = 0; e < o.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < order.size(); b += o.batch) {
      const std::size_t count = std::min(o.batch, order.size() - b);
      Tensor4 batch(count, data.train.c(), data.train.h(), data.train.w());
      for (std::size_t k = 0; k < count; ++k)
        std::copy_n(data.train.sample(order[b + k]), batch.c() * batch.plane(),
                    batch.sample(k));
      sum += backward_and_step(st, batch, o.optimizer, o.workers);
      ++batches;
    }
    run.epoch_loss.push_back(sum / static_cast<double>(batches));
  }
  const auto maps = infer(st, data.test, o.reduce);
  run.eval.category = "toy";
  for (std::size_t n = 0; n < maps.size(); ++n)
    run.eval.images.push_back({"toy_" + std::to_string(n), data.labels[n], maps[n],
                               data.masks[n], std::nullopt});
  run.record = evaluate_category(run.eval);
  return run;
}

}  // namespace adbench::invad
