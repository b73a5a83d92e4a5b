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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "adbench/cocoad/coco.hpp"
#include "adbench/data/manifest.hpp"
#include "adbench/data/mask_io.hpp"
#include "adbench/data/types.hpp"
#include "adbench/error.hpp"
#include "adbench/parallel.hpp"

namespace adbench::coco {

inline constexpr std::size_t kCategoryCount = 80;
inline constexpr std::size_t kSplitCount = 4;
inline constexpr std::size_t kAnomalyClassesPerSplit = 20;

struct SplitAssignment {
  std::size_t index = 0;
  std::set<std::int64_t> anomaly_ids;
  std::set<std::int64_t> normal_ids;  // background is implicitly normal as well
};

/// Split k treats ordinals [20k, 20k + 19] (ascending category id) as anomalous.
inline std::vector<SplitAssignment> assign_splits(const std::vector<CocoCategory>& categories) {
  if (categories.size() != kCategoryCount) {
    fail(ErrorCode::kInvalidArgument, "expected " + std::to_string(kCategoryCount) + " categories, got " +
                                          std::to_string(categories.size()));
  }
  std::vector<CocoCategory> ordered = categories;
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t k = 1; k < ordered.size(); ++k) {
    if (ordered[k].id == ordered[k - 1].id) fail(ErrorCode::kIntegrity, "duplicate category id " + std::to_string(ordered[k].id));
  }
  std::vector<SplitAssignment> splits(kSplitCount);
  for (std::size_t s = 0; s < kSplitCount; ++s) {
    splits[s].index = s;
    for (std::size_t k = 0; k < ordered.size(); ++k) {
      const bool anomalous = k / kAnomalyClassesPerSplit == s;
      (anomalous ? splits[s].anomaly_ids : splits[s].normal_ids).insert(ordered[k].id);
    }
  }
  return splits;
}

struct BuildSplitOptions {
  bool include_crowd = true;         // crowd regions count as anomalous pixels
  bool include_unannotated = false;  // keep images without any annotation (as normal)
  bool per_class = false;            // one manifest category per anomaly class
  std::size_t workers = 1;
  std::filesystem::path train_image_dir = "train2017";
  std::filesystem::path val_image_dir = "val2017";
};

struct BuildReport {
  std::size_t split = 0;
  std::size_t train = 0;
  std::size_t test_normal = 0;
  std::size_t test_anomaly = 0;
  std::size_t skipped_unannotated_train = 0;
  std::size_t skipped_unannotated_val = 0;
  std::size_t skipped_crowd_only_train = 0;
  std::size_t skipped_crowd_only_val = 0;
  std::size_t patched_empty_masks = 0;  // annotations too thin to cover any pixel centre
  std::vector<std::string> anomaly_categories;
};

inline void to_json(nlohmann::json& j, const BuildReport& r) {
  j = nlohmann::json{{"split", r.split},
                     {"train", r.train},
                     {"test_normal", r.test_normal},
                     {"test_anomaly", r.test_anomaly},
                     {"skipped_unannotated_train", r.skipped_unannotated_train},
                     {"skipped_unannotated_val", r.skipped_unannotated_val},
                     {"skipped_crowd_only_train", r.skipped_crowd_only_train},
                     {"skipped_crowd_only_val", r.skipped_crowd_only_val},
                     {"patched_empty_masks", r.patched_empty_masks},
                     {"anomaly_categories", r.anomaly_categories}};
}

struct BuildResult {
  DatasetManifest manifest;
  BuildReport report;
};

namespace detail {

enum class Membership { kSkipUnannotated, kSkipCrowdOnly, kNormal, kAnomalous };

struct ImageAnnotations {
  std::vector<std::size_t> all;      // annotation indices
  std::vector<std::size_t> anomaly;  // indices of anomaly-category annotations that paint the mask
  bool crowd_only_anomaly = false;   // anomaly annotations exist but were all dropped as crowd
};

inline std::vector<ImageAnnotations> group_by_image(const CocoDataset& ds, const SplitAssignment& split,
                                                    const BuildSplitOptions& options) {
  std::vector<ImageAnnotations> per_image(ds.images.size());
  std::vector<std::uint8_t> dropped_crowd(ds.images.size(), 0);
  for (std::size_t a = 0; a < ds.annotations.size(); ++a) {
    const auto& ann = ds.annotations[a];
    const std::size_t im = ds.image_index.at(ann.image_id);
    per_image[im].all.push_back(a);
    if (!split.anomaly_ids.contains(ann.category_id)) continue;
    if (ann.iscrowd && !options.include_crowd) {
      dropped_crowd[im] = 1;
      continue;
    }
    per_image[im].anomaly.push_back(a);
  }
  for (std::size_t im = 0; im < per_image.size(); ++im) {
    per_image[im].crowd_only_anomaly = dropped_crowd[im] && per_image[im].anomaly.empty();
  }
  return per_image;
}

inline Membership classify(const ImageAnnotations& ia, const BuildSplitOptions& options) {
  if (ia.all.empty() && !options.include_unannotated) return Membership::kSkipUnannotated;
  if (ia.crowd_only_anomaly) return Membership::kSkipCrowdOnly;
  return ia.anomaly.empty() ? Membership::kNormal : Membership::kAnomalous;
}

// Sub-pixel annotations miss every pixel centre; the pixel holding the vertex
// mean keeps the image's mask non-empty.
inline void mark_centroid(const CocoAnnotation& ann, BinaryMask& mask) {
  const auto* polys = std::get_if<std::vector<Polygon>>(&ann.segmentation);
  if (polys == nullptr) return;
  for (const auto& poly : *polys) {
    double x = 0.0;
    double y = 0.0;
    for (const auto& p : poly) {
      x += p.x;
      y += p.y;
    }
    x /= static_cast<double>(poly.size());
    y /= static_cast<double>(poly.size());
    const auto c = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(mask.width() - 1)));
    const auto r = static_cast<std::size_t>(std::clamp(std::floor(y), 0.0, static_cast<double>(mask.height() - 1)));
    mask.set(r, c, true);
  }
}

inline std::string image_stem(const CocoImage& im) {
  if (!im.file_name.empty()) return std::filesystem::path(im.file_name).stem().string();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%012lld", static_cast<long long>(im.id));
  return buf;
}

inline void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
  if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace detail

/// Builds one split. Training images are train-set images without any
/// anomaly-class annotation; every kept val image is a test image, anomalous
/// iff it carries an anomaly-class annotation. Writes
///   <out>/split<k>/train/good/images.txt
///   <out>/split<k>/test/{good,anomaly}/images.txt
///   <out>/split<k>/test/anomaly/<stem>.pgm   (255 = anomalous)
///   <out>/split<k>/manifest.json
/// `train` may be parsed without segmentations.
inline BuildResult build_split(const CocoDataset& train, const CocoDataset& val, const SplitAssignment& split,
                               const std::filesystem::path& out, const BuildSplitOptions& options = {}) {
  BuildResult result;
  BuildReport& report = result.report;
  report.split = split.index;
  for (const auto& cat : val.categories) {
    if (split.anomaly_ids.contains(cat.id)) report.anomaly_categories.push_back(cat.name);
  }
  const auto root = out / ("split" + std::to_string(split.index));
  std::filesystem::create_directories(root / "test" / "good");
  std::filesystem::create_directories(root / "test" / "anomaly");

  // Training membership
  std::vector<std::size_t> train_order(train.images.size());
  for (std::size_t k = 0; k < train_order.size(); ++k) train_order[k] = k;
  std::sort(train_order.begin(), train_order.end(),
            [&](auto a, auto b) { return train.images[a].id < train.images[b].id; });
  const auto train_groups = detail::group_by_image(train, split, options);
  std::vector<std::string> train_lines;
  for (auto k : train_order) {
    switch (detail::classify(train_groups[k], options)) {
      case detail::Membership::kSkipUnannotated: ++report.skipped_unannotated_train; break;
      case detail::Membership::kSkipCrowdOnly: ++report.skipped_crowd_only_train; break;
      case detail::Membership::kNormal:
        train_lines.push_back((options.train_image_dir / train.images[k].file_name).generic_string());
        break;
      case detail::Membership::kAnomalous: break;
    }
  }
  report.train = train_lines.size();
  detail::write_lines(root / "train" / "good" / "images.txt", train_lines);

  // Test membership
  std::vector<std::size_t> val_order(val.images.size());
  for (std::size_t k = 0; k < val_order.size(); ++k) val_order[k] = k;
  std::sort(val_order.begin(), val_order.end(), [&](auto a, auto b) { return val.images[a].id < val.images[b].id; });
  const auto val_groups = detail::group_by_image(val, split, options);
  std::vector<std::size_t> normals;
  std::vector<std::size_t> anomalies;
  for (auto k : val_order) {
    switch (detail::classify(val_groups[k], options)) {
      case detail::Membership::kSkipUnannotated: ++report.skipped_unannotated_val; break;
      case detail::Membership::kSkipCrowdOnly: ++report.skipped_crowd_only_val; break;
      case detail::Membership::kNormal: normals.push_back(k); break;
      case detail::Membership::kAnomalous: anomalies.push_back(k); break;
    }
  }
  report.test_normal = normals.size();
  report.test_anomaly = anomalies.size();

  std::vector<std::uint8_t> patched(anomalies.size(), 0);
  parallel_for(anomalies.size(), options.workers, [&](std::size_t i) {
    const CocoImage& im = val.images[anomalies[i]];
    BinaryMask mask(im.height, im.width);
    for (auto a : val_groups[anomalies[i]].anomaly) paint_annotation(val.annotations[a], mask);
    if (!mask.any()) {
      for (auto a : val_groups[anomalies[i]].anomaly) detail::mark_centroid(val.annotations[a], mask);
      patched[i] = 1;
    }
    write_pgm_mask(mask, root / "test" / "anomaly" / (detail::image_stem(im) + ".pgm"));
  });
  for (auto p : patched) report.patched_empty_masks += p;

  std::vector<std::string> lines;
  for (auto k : normals) lines.push_back((options.val_image_dir / val.images[k].file_name).generic_string());
  detail::write_lines(root / "test" / "good" / "images.txt", lines);
  lines.clear();
  for (auto k : anomalies) lines.push_back((options.val_image_dir / val.images[k].file_name).generic_string());
  detail::write_lines(root / "test" / "anomaly" / "images.txt", lines);

  // Manifest
  auto record_json = [&](std::size_t k, bool anomalous) {
    const CocoImage& im = val.images[k];
    const std::string stem = detail::image_stem(im);
    nlohmann::json rec{{"id", stem},
                       {"label", anomalous ? "anomalous" : "normal"},
                       {"image", (options.val_image_dir / im.file_name).generic_string()},
                       {"score_map", stem + ".adtb"}};
    if (anomalous) rec["mask"] = "test/anomaly/" + stem + ".pgm";
    return rec;
  };
  auto normal_records = nlohmann::json::array();
  for (auto k : normals) normal_records.push_back(record_json(k, false));

  nlohmann::json categories = nlohmann::json::array();
  const std::string split_name = "split" + std::to_string(split.index);
  if (!options.per_class) {
    nlohmann::json records = normal_records;
    for (auto k : anomalies) records.push_back(record_json(k, true));
    categories.push_back({{"name", split_name}, {"records", std::move(records)}});
  } else {
    for (const auto& cat : val.categories) {
      if (!split.anomaly_ids.contains(cat.id)) continue;
      nlohmann::json records = normal_records;
      std::size_t hits = 0;
      for (auto k : anomalies) {
        const auto& group = val_groups[k].anomaly;
        const bool has = std::any_of(group.begin(), group.end(),
                                     [&](auto a) { return val.annotations[a].category_id == cat.id; });
        if (has) {
          records.push_back(record_json(k, true));
          ++hits;
        }
      }
      if (hits > 0) categories.push_back({{"name", cat.name}, {"records", std::move(records)}});
    }
  }
  nlohmann::json category_order = nlohmann::json::array();
  for (const auto& cat : val.categories) category_order.push_back({{"id", cat.id}, {"name", cat.name}});
  const nlohmann::json doc{{"name", "coco-ad-" + split_name},
                           {"gt_root", "."},
                           {"pred_root", "predictions"},
                           {"category_order", std::move(category_order)},
                           {"build_report", report},
                           {"categories", std::move(categories)}};
  {
    std::ofstream mf(root / "manifest.json", std::ios::binary);
    if (!mf) fail(ErrorCode::kIo, "cannot write " + (root / "manifest.json").string());
    mf << doc.dump(1) << '\n';
  }

  ManifestLoadOptions load;
  load.require_predictions = false;
  load.check_mask_content = false;
  if (report.test_anomaly > 0 && report.test_normal > 0) {
    result.manifest = manifest_from_json(doc, root, load);
  } else {
    result.manifest.name = doc["name"].get<std::string>();
    result.manifest.ground_truth_root = root;
    result.manifest.prediction_root = root / "predictions";
  }
  return result;
}

}  // namespace adbench::coco
