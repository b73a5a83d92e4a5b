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

// Binary-mask primitives: thresholding, confusion counting, connected
// components and per-region statistics.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "adbench/data/types.hpp"
#include "adbench/error.hpp"

namespace adbench {

/// Pixel is anomalous iff score >= threshold.
inline BinaryMask binarize(const ScoreMap& map, double threshold) {
  std::vector<std::uint8_t> labels(map.size());
  const auto& s = map.scores();
  for (std::size_t i = 0; i < s.size(); ++i) labels[i] = s[i] >= threshold ? 1 : 0;
  return BinaryMask(map.height(), map.width(), std::move(labels));
}

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion_counts(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) {
    fail(ErrorCode::kShapeMismatch, "prediction and ground-truth masks differ in size");
  }
  // Index 2*pred + gt selects tn, fn, fp, tp.
  std::uint64_t bins[4] = {0, 0, 0, 0};
  const auto& p = pred.labels();
  const auto& g = gt.labels();
  for (std::size_t i = 0; i < p.size(); ++i) ++bins[2 * p[i] + g[i]];
  return {bins[3], bins[2], bins[1], bins[0]};
}

enum class Connectivity { kFour = 4, kEight = 8 };

struct BoundingBox {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t row1 = 0;  // inclusive
  std::size_t col1 = 0;  // inclusive

  std::size_t height() const noexcept { return row1 - row0 + 1; }
  std::size_t width() const noexcept { return col1 - col0 + 1; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// A connected set of anomalous pixels. `pixels` holds row-major linear
/// indices in ascending order; row = index / width, col = index % width.
struct Region {
  std::size_t id = 0;
  std::vector<std::size_t> pixels;
  std::size_t area = 0;
  BoundingBox bbox;
};

namespace detail {

class DisjointSets {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    rank_.push_back(0);
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace detail

/// Two-pass labelling with union-find. Region ids follow the row-major
/// position of each region's first pixel.
inline std::vector<Region> connected_components(const BinaryMask& mask,
                                                Connectivity connectivity = Connectivity::kEight) {
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  constexpr std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> provisional(mask.size(), kNone);
  detail::DisjointSets sets;
  const bool eight = connectivity == Connectivity::kEight;

  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t i = r * w + c;
      if (!mask[i]) continue;
      std::uint32_t label = kNone;
      auto join = [&](std::size_t j) {
        const std::uint32_t other = provisional[j];
        if (other == kNone) return;
        if (label == kNone) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      };
      if (c > 0) join(i - 1);
      if (r > 0) {
        join(i - w);
        if (eight && c > 0) join(i - w - 1);
        if (eight && c + 1 < w) join(i - w + 1);
      }
      provisional[i] = label == kNone ? sets.make() : label;
    }
  }

  std::vector<Region> regions;
  std::vector<std::size_t> region_of_root;
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    if (provisional[i] == kNone) continue;
    const std::uint32_t root = sets.find(provisional[i]);
    if (root >= region_of_root.size()) region_of_root.resize(static_cast<std::size_t>(root) + 1, SIZE_MAX);
    if (region_of_root[root] == SIZE_MAX) {
      region_of_root[root] = regions.size();
      Region region;
      region.id = regions.size();
      region.bbox = {i / w, i % w, i / w, i % w};
      regions.push_back(std::move(region));
    }
    Region& region = regions[region_of_root[root]];
    const std::size_t r = i / w;
    const std::size_t c = i % w;
    region.pixels.push_back(i);
    region.bbox.row0 = std::min(region.bbox.row0, r);
    region.bbox.row1 = std::max(region.bbox.row1, r);
    region.bbox.col0 = std::min(region.bbox.col0, c);
    region.bbox.col1 = std::max(region.bbox.col1, c);
  }
  for (auto& region : regions) region.area = region.pixels.size();
  return regions;
}

struct RegionStatsRecord {
  std::size_t image_height = 0;
  std::size_t image_width = 0;
  std::size_t region_count = 0;
  std::vector<double> area_proportions;  // area / (H*W), one per region
  std::vector<double> aspect_ratios;     // bbox height / bbox width, one per region
  double total_area_proportion = 0.0;    // union of all regions / (H*W)
};

inline RegionStatsRecord region_statistics(const std::vector<Region>& regions, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) fail(ErrorCode::kInvalidArgument, "region statistics need a non-empty image");
  RegionStatsRecord rec;
  rec.image_height = height;
  rec.image_width = width;
  rec.region_count = regions.size();
  const double pixels = static_cast<double>(height) * static_cast<double>(width);
  std::size_t total = 0;
  for (const auto& region : regions) {
    rec.area_proportions.push_back(static_cast<double>(region.area) / pixels);
    rec.aspect_ratios.push_back(static_cast<double>(region.bbox.height()) / static_cast<double>(region.bbox.width()));
    total += region.area;
  }
  rec.total_area_proportion = static_cast<double>(total) / pixels;
  return rec;
}

inline void to_json(nlohmann::json& j, const RegionStatsRecord& rec) {
  j = nlohmann::json{{"image_height", rec.image_height},
                     {"image_width", rec.image_width},
                     {"region_count", rec.region_count},
                     {"area_proportions", rec.area_proportions},
                     {"aspect_ratios", rec.aspect_ratios},
                     {"total_area_proportion", rec.total_area_proportion}};
}

}  // namespace adbench
