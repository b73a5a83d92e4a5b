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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "adbench/cocoad/polygon.hpp"
#include "adbench/cocoad/rle.hpp"
#include "adbench/data/types.hpp"
#include "adbench/error.hpp"

namespace adbench::coco {

struct CocoCategory {
  std::int64_t id = 0;
  std::string name;
  std::size_t ordinal = 0;  // position in ascending-id order
};

struct CocoImage {
  std::int64_t id = 0;
  std::string file_name;
  std::size_t height = 0;
  std::size_t width = 0;
};

/// Either polygons or run lengths; monostate when segmentations were not kept.
using Segmentation = std::variant<std::monostate, std::vector<Polygon>, RunLengths>;

struct CocoAnnotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  bool iscrowd = false;
  double area = 0.0;
  Segmentation segmentation;
};

struct CocoDataset {
  std::vector<CocoCategory> categories;  // ascending id
  std::vector<CocoImage> images;
  std::vector<CocoAnnotation> annotations;

  std::unordered_map<std::int64_t, std::size_t> category_index;
  std::unordered_map<std::int64_t, std::size_t> image_index;
};

struct CocoParseOptions {
  // Training sets only need image/category membership; dropping polygons
  // keeps the 118k-image train file within memory.
  bool keep_segmentation = true;
};

namespace detail {

inline std::int64_t json_int(const nlohmann::json& obj, const char* key, const char* what) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer()) {
    fail(ErrorCode::kMalformed, std::string(what) + " is missing integer field '" + key + "'");
  }
  return obj.at(key).get<std::int64_t>();
}

inline Segmentation parse_segmentation(const nlohmann::json& seg, std::int64_t ann_id) {
  const std::string where = "annotation " + std::to_string(ann_id);
  if (seg.is_array()) {
    std::vector<Polygon> polys;
    for (const auto& flat : seg) {
      if (!flat.is_array()) fail(ErrorCode::kMalformed, where + ": polygon must be a coordinate list");
      const auto coords = flat.get<std::vector<double>>();
      if (coords.size() < 6) fail(ErrorCode::kMalformed, where + ": polygon needs at least 6 coordinates");
      polys.push_back(polygon_from_flat(coords));
    }
    if (polys.empty()) fail(ErrorCode::kMalformed, where + ": empty polygon list");
    return polys;
  }
  if (seg.is_object() && seg.contains("counts") && seg.contains("size")) {
    const auto size = seg.at("size").get<std::vector<std::size_t>>();
    if (size.size() != 2) fail(ErrorCode::kMalformed, where + ": RLE size must be [height, width]");
    RunLengths rle{size[0], size[1], {}};
    const auto& counts = seg.at("counts");
    if (counts.is_string()) {
      rle.counts = decompress_counts(counts.get<std::string>());
    } else if (counts.is_array()) {
      rle.counts = counts.get<std::vector<std::uint32_t>>();
    } else {
      fail(ErrorCode::kMalformed, where + ": RLE counts must be a list or a string");
    }
    std::uint64_t total = 0;
    for (auto c : rle.counts) total += c;
    if (total != static_cast<std::uint64_t>(rle.height) * rle.width) {
      fail(ErrorCode::kMalformed, where + ": RLE counts do not sum to height * width");
    }
    return rle;
  }
  fail(ErrorCode::kMalformed, where + ": unrecognised segmentation");
}

}  // namespace detail

/// Parses a COCO instances document. Records are converted one at a time as
/// the parser leaves them, so the DOM never holds the whole file.
inline CocoDataset parse_coco(std::istream& in, const CocoParseOptions& options = {}) {
  CocoDataset ds;
  std::string section;
  bool saw_images = false;
  bool saw_annotations = false;
  bool saw_categories = false;
  using Event = nlohmann::json::parse_event_t;
  auto callback = [&](int depth, Event event, nlohmann::json& parsed) -> bool {
    if (depth == 1 && event == Event::key) {
      section = parsed.get<std::string>();
      if (section == "images") saw_images = true;
      if (section == "annotations") saw_annotations = true;
      if (section == "categories") saw_categories = true;
      return true;
    }
    if (depth == 3 && event == Event::key && section == "annotations" && !options.keep_segmentation) {
      return parsed.get<std::string>() != "segmentation";
    }
    if (depth == 2 && event == Event::object_end) {
      if (section == "images") {
        CocoImage im;
        im.id = detail::json_int(parsed, "id", "image");
        im.height = static_cast<std::size_t>(detail::json_int(parsed, "height", "image"));
        im.width = static_cast<std::size_t>(detail::json_int(parsed, "width", "image"));
        if (parsed.contains("file_name") && parsed.at("file_name").is_string()) {
          im.file_name = parsed.at("file_name").get<std::string>();
        }
        ds.images.push_back(std::move(im));
        return false;
      }
      if (section == "annotations") {
        CocoAnnotation ann;
        ann.id = detail::json_int(parsed, "id", "annotation");
        ann.image_id = detail::json_int(parsed, "image_id", "annotation");
        ann.category_id = detail::json_int(parsed, "category_id", "annotation");
        if (parsed.contains("iscrowd")) ann.iscrowd = parsed.at("iscrowd").get<int>() != 0;
        if (parsed.contains("area") && parsed.at("area").is_number()) ann.area = parsed.at("area").get<double>();
        if (options.keep_segmentation) {
          if (!parsed.contains("segmentation")) {
            fail(ErrorCode::kMalformed, "annotation " + std::to_string(ann.id) + " has no segmentation");
          }
          ann.segmentation = detail::parse_segmentation(parsed.at("segmentation"), ann.id);
        }
        ds.annotations.push_back(std::move(ann));
        return false;
      }
      if (section == "categories") {
        CocoCategory cat;
        cat.id = detail::json_int(parsed, "id", "category");
        if (parsed.contains("name") && parsed.at("name").is_string()) cat.name = parsed.at("name").get<std::string>();
        ds.categories.push_back(std::move(cat));
        return false;
      }
    }
    return true;
  };
  try {
    const nlohmann::json rest = nlohmann::json::parse(in, callback);
    if (!rest.is_object()) fail(ErrorCode::kMalformed, "COCO annotation file must hold a JSON object");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformed, std::string("COCO annotation file: ") + e.what());
  }
  if (!saw_images || !saw_annotations || !saw_categories) {
    fail(ErrorCode::kMalformed, "COCO annotation file needs 'images', 'annotations' and 'categories' arrays");
  }

  std::sort(ds.categories.begin(), ds.categories.end(),
            [](const CocoCategory& a, const CocoCategory& b) { return a.id < b.id; });
  for (std::size_t k = 0; k < ds.categories.size(); ++k) {
    ds.categories[k].ordinal = k;
    if (!ds.category_index.emplace(ds.categories[k].id, k).second) {
      fail(ErrorCode::kIntegrity, "duplicate category id " + std::to_string(ds.categories[k].id));
    }
  }
  for (std::size_t k = 0; k < ds.images.size(); ++k) {
    if (!ds.image_index.emplace(ds.images[k].id, k).second) {
      fail(ErrorCode::kIntegrity, "duplicate image id " + std::to_string(ds.images[k].id));
    }
  }
  std::unordered_map<std::int64_t, bool> ann_ids;
  ann_ids.reserve(ds.annotations.size());
  for (const auto& ann : ds.annotations) {
    if (!ann_ids.emplace(ann.id, true).second) fail(ErrorCode::kIntegrity, "duplicate annotation id " + std::to_string(ann.id));
    const auto img = ds.image_index.find(ann.image_id);
    if (img == ds.image_index.end()) {
      fail(ErrorCode::kIntegrity, "annotation " + std::to_string(ann.id) + " references unknown image " +
                                      std::to_string(ann.image_id));
    }
    if (!ds.category_index.contains(ann.category_id)) {
      fail(ErrorCode::kIntegrity, "annotation " + std::to_string(ann.id) + " references unknown category " +
                                      std::to_string(ann.category_id));
    }
    if (const auto* rle = std::get_if<RunLengths>(&ann.segmentation)) {
      const CocoImage& im = ds.images[img->second];
      if (rle->height != im.height || rle->width != im.width) {
        fail(ErrorCode::kIntegrity, "annotation " + std::to_string(ann.id) + ": RLE size differs from its image");
      }
    }
  }
  return ds;
}

inline CocoDataset parse_coco(const std::filesystem::path& source, const CocoParseOptions& options = {}) {
  std::ifstream in(source, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + source.string());
  return parse_coco(in, options);
}

/// Rasterizes one annotation onto `mask` (which has the image's size).
inline void paint_annotation(const CocoAnnotation& ann, BinaryMask& mask) {
  if (const auto* polys = std::get_if<std::vector<Polygon>>(&ann.segmentation)) {
    for (const auto& p : *polys) fill_polygon(p, mask);
  } else if (const auto* rle = std::get_if<RunLengths>(&ann.segmentation)) {
    if (rle->height != mask.height() || rle->width != mask.width()) {
      fail(ErrorCode::kShapeMismatch, "annotation " + std::to_string(ann.id) + ": RLE size differs from the mask");
    }
    const BinaryMask m = decode_rle(*rle);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i]) mask.set(i, true);
    }
  } else {
    fail(ErrorCode::kMalformed, "annotation " + std::to_string(ann.id) + " has no segmentation loaded");
  }
}

}  // namespace adbench::coco
