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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adbench/error.hpp"

namespace adbench {

/// Per-pixel real-valued anomaly scores of one image, row-major.
class ScoreMap {
 public:
  ScoreMap() = default;
  ScoreMap(std::size_t height, std::size_t width, std::vector<double> scores)
      : height_(height), width_(width), scores_(std::move(scores)) {
    if (height_ == 0 || width_ == 0) {
      fail(ErrorCode::kShapeMismatch, "score map must have non-zero area");
    }
    if (scores_.size() != height_ * width_) {
      fail(ErrorCode::kShapeMismatch,
           "score map holds " + std::to_string(scores_.size()) +
               " values, expected " + std::to_string(height_ * width_));
    }
    for (double s : scores_) {
      if (!std::isfinite(s)) fail(ErrorCode::kInvalidArgument, "score map contains a non-finite value");
    }
  }
  ScoreMap(std::size_t height, std::size_t width, double fill)
      : ScoreMap(height, width, std::vector<double>(height * width, fill)) {}

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return scores_.size(); }
  const std::vector<double>& scores() const noexcept { return scores_; }
  double operator()(std::size_t row, std::size_t col) const { return scores_[row * width_ + col]; }
  double operator[](std::size_t i) const { return scores_[i]; }

  friend bool operator==(const ScoreMap&, const ScoreMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> scores_;
};

/// Per-pixel anomaly labels, row-major, one byte per pixel (0 or 1).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t height, std::size_t width, bool fill = false)
      : height_(height), width_(width), labels_(height * width, fill ? 1 : 0) {}
  BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> labels)
      : height_(height), width_(width), labels_(std::move(labels)) {
    if (labels_.size() != height_ * width_) {
      fail(ErrorCode::kShapeMismatch, "mask holds " + std::to_string(labels_.size()) +
                                          " labels, expected " + std::to_string(height_ * width_));
    }
    for (auto& l : labels_) l = l ? 1 : 0;
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }

  bool operator()(std::size_t row, std::size_t col) const { return labels_[row * width_ + col] != 0; }
  bool operator[](std::size_t i) const { return labels_[i] != 0; }
  void set(std::size_t row, std::size_t col, bool value) { labels_[row * width_ + col] = value ? 1 : 0; }
  void set(std::size_t i, bool value) { labels_[i] = value ? 1 : 0; }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto l : labels_) n += l;
    return n;
  }
  bool any() const noexcept {
    for (auto l : labels_) {
      if (l) return true;
    }
    return false;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint8_t> labels_;
};

enum class ImageLabel { kNormal, kAnomalous };

inline const char* to_string(ImageLabel label) {
  return label == ImageLabel::kNormal ? "normal" : "anomalous";
}

/// One test item as described by a manifest. Paths are already resolved.
struct ImageRecord {
  std::string id;
  std::string category;
  ImageLabel label = ImageLabel::kNormal;
  std::filesystem::path score_map_path;
  std::optional<std::filesystem::path> mask_path;
  std::optional<double> image_score;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct CategoryDescriptor {
  std::string name;
  std::vector<ImageRecord> records;

  friend bool operator==(const CategoryDescriptor&, const CategoryDescriptor&) = default;
};

struct DatasetManifest {
  std::string name;
  std::vector<CategoryDescriptor> categories;
  std::filesystem::path ground_truth_root;
  std::filesystem::path prediction_root;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// A loaded test item: prediction, ground truth and label.
struct EvalImage {
  std::string id;
  ImageLabel label = ImageLabel::kNormal;
  ScoreMap map;
  BinaryMask mask;  // all-false for normal images without a mask file
  std::optional<double> image_score;
};

/// All test images of one category; the unit every "m"-prefixed metric averages over.
struct CategoryEvalSet {
  std::string category;
  std::vector<EvalImage> images;

  std::size_t pixel_count() const noexcept {
    std::size_t n = 0;
    for (const auto& im : images) n += im.map.size();
    return n;
  }
};

}  // namespace adbench
