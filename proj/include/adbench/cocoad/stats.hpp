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
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "adbench/data/manifest.hpp"
#include "adbench/data/mask_io.hpp"
#include "adbench/data/types.hpp"
#include "adbench/error.hpp"
#include "adbench/maskops.hpp"

namespace adbench::coco {

/// Right-closed bins (e[k], e[k+1]]; the first bin also takes e[0].
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;

  Histogram() = default;
  explicit Histogram(std::vector<double> e) : edges(std::move(e)), counts(edges.size() - 1, 0) {}

  void add(double v) {
    auto it = std::lower_bound(edges.begin() + 1, edges.end(), v);
    if (it == edges.end()) it = edges.end() - 1;
    ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
  }
  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
};

inline void to_json(nlohmann::json& j, const Histogram& h) {
  nlohmann::json edges = nlohmann::json::array();
  for (double e : h.edges) {
    if (std::isinf(e)) edges.push_back("inf");
    else edges.push_back(e);
  }
  j = nlohmann::json{{"edges", std::move(edges)}, {"counts", h.counts}};
}

/// The four distributions: single-region area proportion, per-image
/// anomalous-area proportion, regions per image, region aspect ratio (bbox h/w).
struct StatsReport {
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  Histogram region_area{{0.0, 0.02, 0.05, 0.10, 0.20, 0.50, 1.0}};
  Histogram image_area{{0.0, 0.02, 0.05, 0.10, 0.20, 0.50, 1.0}};
  Histogram regions_per_image{{0, 1, 2, 3, 4, 5, 10, 20, kInf}};
  Histogram aspect_ratio{{0.0, 0.1, 0.5, 1.0, 2.0, 10.0, kInf}};
  std::size_t images = 0;
  std::size_t regions = 0;
  double max_region_area = 0.0;
  double max_aspect_ratio = 0.0;

  void add(const BinaryMask& mask, Connectivity connectivity = Connectivity::kEight) {
    const auto rec = region_statistics(connected_components(mask, connectivity), mask.height(), mask.width());
    ++images;
    regions += rec.region_count;
    for (double a : rec.area_proportions) {
      region_area.add(a);
      max_region_area = std::max(max_region_area, a);
    }
    for (double r : rec.aspect_ratios) {
      aspect_ratio.add(r);
      max_aspect_ratio = std::max(max_aspect_ratio, r);
    }
    image_area.add(rec.total_area_proportion);
    regions_per_image.add(static_cast<double>(rec.region_count));
  }

  /// Fraction of per-image anomalous-area proportions at or below `p`
  /// (p must be one of the bin edges).
  double image_area_fraction_within(double p) const {
    std::uint64_t n = 0;
    for (std::size_t k = 0; k + 1 < image_area.edges.size() && image_area.edges[k + 1] <= p + 1e-12; ++k) {
      n += image_area.counts[k];
    }
    return images == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(images);
  }
};

inline void to_json(nlohmann::json& j, const StatsReport& s) {
  j = nlohmann::json{{"images", s.images},
                     {"regions", s.regions},
                     {"region_area_proportion", s.region_area},
                     {"image_area_proportion", s.image_area},
                     {"regions_per_image", s.regions_per_image},
                     {"region_aspect_ratio", s.aspect_ratio},
                     {"image_area_within_10pct", s.image_area_fraction_within(0.10)},
                     {"max_region_area_proportion", s.max_region_area},
                     {"max_aspect_ratio", s.max_aspect_ratio}};
}

/// Statistics over the masks of every anomalous record of the manifest.
inline StatsReport dataset_statistics(const DatasetManifest& manifest,
                                      Connectivity connectivity = Connectivity::kEight) {
  StatsReport report;
  std::set<std::filesystem::path> seen;  // per-class manifests repeat images
  for (const auto& cat : manifest.categories) {
    for (const auto& rec : cat.records) {
      if (rec.label != ImageLabel::kAnomalous || !rec.mask_path) continue;
      if (!seen.insert(*rec.mask_path).second) continue;
      report.add(read_mask(*rec.mask_path), connectivity);
    }
  }
  if (report.images == 0) fail(ErrorCode::kPrecondition, "manifest '" + manifest.name + "' has no anomalous masks");
  return report;
}

}  // namespace adbench::coco
