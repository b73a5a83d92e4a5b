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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "adbench/data/mask_io.hpp"
#include "adbench/data/types.hpp"
#include "adbench/error.hpp"

namespace adbench {

struct ManifestLoadOptions {
  // Require every score_map path to exist. Off for ground-truth-only manifests
  // (e.g. a freshly built COCO-AD split awaiting predictions).
  bool require_predictions = true;
  // Open every mask and check its content against the record label.
  bool check_mask_content = true;
};

namespace detail {

inline std::string json_string(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_string()) {
    fail(ErrorCode::kValidation, where + ": missing string field '" + key + "'");
  }
  return obj.at(key).get<std::string>();
}

inline std::filesystem::path resolve(const std::filesystem::path& root, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : root / path;
}

}  // namespace detail

/// Builds a manifest from an already-parsed JSON document; relative paths resolve against base_dir.
inline DatasetManifest manifest_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                                          const ManifestLoadOptions& options = {}) {
  if (!doc.is_object()) fail(ErrorCode::kValidation, "manifest must be a JSON object");
  DatasetManifest manifest;
  manifest.name = detail::json_string(doc, "name", "manifest");
  manifest.ground_truth_root = base_dir;
  manifest.prediction_root = base_dir;
  if (doc.contains("gt_root")) manifest.ground_truth_root = detail::resolve(base_dir, detail::json_string(doc, "gt_root", "manifest"));
  if (doc.contains("pred_root")) manifest.prediction_root = detail::resolve(base_dir, detail::json_string(doc, "pred_root", "manifest"));

  if (!doc.contains("categories") || !doc.at("categories").is_array() || doc.at("categories").empty()) {
    fail(ErrorCode::kValidation, "manifest needs a non-empty 'categories' array");
  }
  std::set<std::string> seen_categories;
  for (const auto& cat : doc.at("categories")) {
    CategoryDescriptor desc;
    desc.name = detail::json_string(cat, "name", "category");
    if (!seen_categories.insert(desc.name).second) {
      fail(ErrorCode::kDuplicateCategory, "category '" + desc.name + "' appears more than once");
    }
    const std::string where_cat = "category '" + desc.name + "'";
    if (!cat.contains("records") || !cat.at("records").is_array() || cat.at("records").empty()) {
      fail(ErrorCode::kValidation, where_cat + ": needs a non-empty 'records' array");
    }
    std::set<std::string> seen_ids;
    std::size_t normals = 0;
    std::size_t anomalies = 0;
    for (const auto& rec : cat.at("records")) {
      ImageRecord record;
      record.category = desc.name;
      record.id = detail::json_string(rec, "id", where_cat + " record");
      const std::string where = where_cat + " record '" + record.id + "'";
      if (!seen_ids.insert(record.id).second) fail(ErrorCode::kValidation, where + ": duplicate record id");
      const std::string label = detail::json_string(rec, "label", where);
      if (label == "normal") {
        record.label = ImageLabel::kNormal;
        ++normals;
      } else if (label == "anomalous") {
        record.label = ImageLabel::kAnomalous;
        ++anomalies;
      } else {
        fail(ErrorCode::kValidation, where + ": label must be 'normal' or 'anomalous', got '" + label + "'");
      }
      record.score_map_path = detail::resolve(manifest.prediction_root, detail::json_string(rec, "score_map", where));
      if (options.require_predictions && !std::filesystem::is_regular_file(record.score_map_path)) {
        fail(ErrorCode::kDanglingPath, where + ": score map " + record.score_map_path.string() + " does not exist");
      }
      if (rec.contains("mask") && !rec.at("mask").is_null()) {
        record.mask_path = detail::resolve(manifest.ground_truth_root, detail::json_string(rec, "mask", where));
        if (!std::filesystem::is_regular_file(*record.mask_path)) {
          fail(ErrorCode::kDanglingPath, where + ": mask " + record.mask_path->string() + " does not exist");
        }
      }
      if (rec.contains("image_score") && !rec.at("image_score").is_null()) {
        if (!rec.at("image_score").is_number()) fail(ErrorCode::kValidation, where + ": image_score must be a number");
        const double s = rec.at("image_score").get<double>();
        if (!std::isfinite(s)) fail(ErrorCode::kValidation, where + ": image_score must be finite");
        record.image_score = s;
      }
      if (record.label == ImageLabel::kAnomalous && !record.mask_path) {
        fail(ErrorCode::kMissingMask, where + ": anomalous record has no mask");
      }
      if (options.check_mask_content && record.mask_path) {
        const BinaryMask mask = read_mask(*record.mask_path);
        if (record.label == ImageLabel::kAnomalous && !mask.any()) {
          fail(ErrorCode::kValidation, where + ": anomalous record has an all-false mask");
        }
        if (record.label == ImageLabel::kNormal && mask.any()) {
          fail(ErrorCode::kValidation, where + ": normal record has anomalous mask pixels");
        }
      }
      desc.records.push_back(std::move(record));
    }
    if (anomalies == 0) fail(ErrorCode::kNoAnomalousRecord, where_cat + ": no anomalous record");
    if (normals == 0) fail(ErrorCode::kValidation, where_cat + ": no normal record");
    manifest.categories.push_back(std::move(desc));
  }
  return manifest;
}

/// Loads and eagerly validates a manifest file.
inline DatasetManifest load_manifest(const std::filesystem::path& source, const ManifestLoadOptions& options = {}) {
  std::ifstream in(source);
  if (!in) fail(ErrorCode::kIo, "cannot open manifest " + source.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kValidation, source.string() + ": " + e.what());
  }
  return manifest_from_json(doc, source.parent_path(), options);
}

/// Reads every prediction and mask of one category into memory.
inline CategoryEvalSet load_category(const CategoryDescriptor& desc) {
  CategoryEvalSet set;
  set.category = desc.name;
  set.images.reserve(desc.records.size());
  for (const auto& rec : desc.records) {
    EvalImage im;
    im.id = rec.id;
    im.label = rec.label;
    im.image_score = rec.image_score;
    im.map = read_score_map(rec.score_map_path);
    if (rec.mask_path) {
      im.mask = read_mask(*rec.mask_path);
      if (im.mask.height() != im.map.height() || im.mask.width() != im.map.width()) {
        fail(ErrorCode::kShapeMismatch, "category '" + desc.name + "' record '" + rec.id +
                                            "': mask and score map dimensions differ");
      }
    } else {
      im.mask = BinaryMask(im.map.height(), im.map.width(), false);
    }
    set.images.push_back(std::move(im));
  }
  return set;
}

}  // namespace adbench
