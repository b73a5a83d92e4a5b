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
#include <string>
#include <vector>

#include "adbench/data/types.hpp"
#include "adbench/error.hpp"

namespace adbench::coco {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Polygon = std::vector<Point>;

/// How far (in pixels) a vertex may sit outside the image; COCO polygons often
/// touch or slightly overshoot the border.
inline constexpr double kVertexTolerance = 2.0;

/// Reads COCO's flat [x0, y0, x1, y1, ...] list.
inline Polygon polygon_from_flat(const std::vector<double>& flat) {
  if (flat.size() % 2 != 0) fail(ErrorCode::kMalformed, "polygon has an odd number of coordinates");
  Polygon poly;
  poly.reserve(flat.size() / 2);
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) poly.push_back({flat[i], flat[i + 1]});
  return poly;
}

/// Even-odd fill sampled at pixel centres (c + 0.5, r + 0.5), ORed into `mask`.
inline void fill_polygon(const Polygon& poly, BinaryMask& mask) {
  if (poly.size() < 3) fail(ErrorCode::kMalformed, "polygon needs at least 3 vertices");
  const double h = static_cast<double>(mask.height());
  const double w = static_cast<double>(mask.width());
  double ymin = poly[0].y;
  double ymax = poly[0].y;
  for (const auto& p : poly) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < -kVertexTolerance || p.y < -kVertexTolerance ||
        p.x > w + kVertexTolerance || p.y > h + kVertexTolerance) {
      fail(ErrorCode::kMalformed, "polygon vertex (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                      ") lies outside the image");
    }
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const auto row_lo = static_cast<std::size_t>(std::max(0.0, std::floor(ymin - 0.5)));
  const auto row_hi = static_cast<std::size_t>(std::clamp(std::ceil(ymax - 0.5), 0.0, h - 1.0));
  std::vector<double> crossings;
  for (std::size_t r = row_lo; r <= row_hi && r < mask.height(); ++r) {
    const double y = static_cast<double>(r) + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point& a = poly[i];
      const Point& b = poly[(i + 1) % poly.size()];
      if ((a.y > y) != (b.y > y)) crossings.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(crossings.begin(), crossings.end());
    // Pixel centre px is inside iff an odd number of crossings lie strictly right of it.
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const double left = crossings[k];
      const double right = crossings[k + 1];
      // centres px with left <= px < right
      const double first = std::max(0.0, std::ceil(left - 0.5));
      for (double c = first; c + 0.5 < right && c < w; c += 1.0) {
        mask.set(r, static_cast<std::size_t>(c), true);
      }
    }
  }
}

inline BinaryMask rasterize_polygon(const Polygon& poly, std::size_t height, std::size_t width) {
  BinaryMask mask(height, width);
  fill_polygon(poly, mask);
  return mask;
}

/// Union of several polygons belonging to one annotation.
inline BinaryMask rasterize_polygons(const std::vector<Polygon>& polys, std::size_t height, std::size_t width) {
  BinaryMask mask(height, width);
  for (const auto& p : polys) fill_polygon(p, mask);
  return mask;
}

}  // namespace adbench::coco
