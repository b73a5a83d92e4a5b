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

// Category-level metric assembly: score normalization, image- and
// pixel-level ranking metrics, threshold-band metrics and AU-PRO.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adbench/curves.hpp"
#include "adbench/data/image_score.hpp"
#include "adbench/data/types.hpp"
#include "adbench/error.hpp"
#include "adbench/maskops.hpp"
#include "adbench/metrics/record.hpp"

namespace adbench {

/// Thresholds start, start+step, ..., end on normalized scores.
struct ThresholdBandConfig {
  double start = 0.2;
  double end = 0.8;
  double step = 0.1;

  void validate() const {
    if (!(start >= 0.0 && end <= 1.0 && start <= end)) {
      fail(ErrorCode::kInvalidArgument, "band needs 0 <= start <= end <= 1");
    }
    if (!(step > 0.0)) fail(ErrorCode::kInvalidArgument, "band step must be positive");
    const double n = (end - start) / step;
    if (std::abs(n - std::round(n)) > 1e-9) {
      fail(ErrorCode::kInvalidArgument, "band (end - start) must be an integer multiple of step");
    }
  }

  /// Thresholds snapped to a 1e-9 grid so that 0.2 + 3 * 0.1 is exactly 0.5.
  std::vector<double> thresholds() const {
    validate();
    const auto n = static_cast<std::size_t>(std::llround((end - start) / step));
    std::vector<double> out;
    for (std::size_t k = 0; k <= n; ++k) {
      out.push_back(std::round((start + static_cast<double>(k) * step) * 1e9) / 1e9);
    }
    return out;
  }
};

/// Parses "start:end:step".
inline ThresholdBandConfig parse_band(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (b == std::string::npos) fail(ErrorCode::kInvalidArgument, "band must look like start:end:step, got '" + text + "'");
  ThresholdBandConfig band;
  try {
    band.start = std::stod(text.substr(0, a));
    band.end = std::stod(text.substr(a + 1, b - a - 1));
    band.step = std::stod(text.substr(b + 1));
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidArgument, "band must look like start:end:step, got '" + text + "'");
  }
  band.validate();
  return band;
}

enum class NormalizationScope { kCategory, kDataset };

struct EvalOptions {
  ThresholdBandConfig band;
  double fpr_cap = 0.3;
  ProFprMode pro_mode = ProFprMode::kPooled;
  ImageScoreMode image_score = MaxScore{};
  Connectivity connectivity = Connectivity::kEight;
  // When set, pixel-level ranking metrics use the quantized histogram path.
  std::optional<std::size_t> histogram_bins;
};

struct ScoreRange {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void include(double s) {
    min = std::min(min, s);
    max = std::max(max, s);
  }
  void include(const ScoreRange& o) {
    min = std::min(min, o.min);
    max = std::max(max, o.max);
  }
};

inline ScoreRange score_range(const CategoryEvalSet& set) {
  ScoreRange range;
  for (const auto& im : set.images) {
    for (double s : im.map.scores()) range.include(s);
  }
  return range;
}

// Rounding to a 1e-12 grid keeps a score that should sit exactly on a band
// threshold from landing one ulp to either side after an affine rescale.
inline double snap_normalized(double x) { return std::round(x * 1e12) / 1e12; }

/// Affinely maps scores onto [0, 1] using the given range. A degenerate range
/// maps everything to 0 and records a warning.
inline CategoryEvalSet normalize_scores(const CategoryEvalSet& set, const ScoreRange& range,
                                        std::vector<std::string>* warnings = nullptr) {
  if (set.images.empty()) fail(ErrorCode::kPrecondition, "category '" + set.category + "' is empty");
  const double span = range.max - range.min;
  const bool degenerate = !(span > 0.0);
  if (degenerate && warnings != nullptr) {
    warnings->push_back("category '" + set.category + "': constant scores, normalized to all zeros");
  }
  CategoryEvalSet out;
  out.category = set.category;
  out.images.reserve(set.images.size());
  for (const auto& im : set.images) {
    std::vector<double> scores(im.map.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = degenerate ? 0.0 : snap_normalized(std::clamp((im.map[i] - range.min) / span, 0.0, 1.0));
    }
    EvalImage copy;
    copy.id = im.id;
    copy.label = im.label;
    copy.mask = im.mask;
    copy.image_score = im.image_score;
    copy.map = ScoreMap(im.map.height(), im.map.width(), std::move(scores));
    out.images.push_back(std::move(copy));
  }
  return out;
}

/// Min-max normalization over every pixel of every test image in the category.
inline CategoryEvalSet normalize_category_scores(const CategoryEvalSet& set,
                                                 std::vector<std::string>* warnings = nullptr) {
  if (set.images.empty()) fail(ErrorCode::kPrecondition, "category '" + set.category + "' is empty");
  return normalize_scores(set, score_range(set), warnings);
}

struct RankingTriple {
  double auroc = 0.0;
  double ap = 0.0;
  double f1max = 0.0;
};

inline RankingTriple to_percent(const RankingSummary& s) {
  return {100.0 * s.auroc, 100.0 * s.average_precision, 100.0 * s.f1.value};
}

inline std::vector<double> image_scores(const CategoryEvalSet& set, const ImageScoreMode& mode = MaxScore{}) {
  std::vector<double> scores;
  scores.reserve(set.images.size());
  for (const auto& im : set.images) scores.push_back(im.image_score ? *im.image_score : derive_image_score(im.map, mode));
  return scores;
}

inline RankingTriple eval_image_level(const CategoryEvalSet& set, const ImageScoreMode& mode = MaxScore{}) {
  const std::vector<double> scores = image_scores(set, mode);
  std::vector<std::uint8_t> labels;
  labels.reserve(set.images.size());
  for (const auto& im : set.images) labels.push_back(im.label == ImageLabel::kAnomalous ? 1 : 0);
  try {
    return to_percent(summarize_ranking(scores, labels));
  } catch (const Error&) {
    fail(ErrorCode::kPrecondition, "category '" + set.category + "': image-level metrics need both classes");
  }
}

struct PixelLevelResult {
  RankingTriple triple;
  double ioumax = 0.0;  // percent
};

inline PixelLevelResult eval_pixel_level_full(const CategoryEvalSet& set, std::optional<std::size_t> histogram_bins = {}) {
  RankingSummary summary;
  try {
    if (histogram_bins) {
      ScoreHistogram hist(*histogram_bins);
      for (const auto& im : set.images) {
        for (std::size_t i = 0; i < im.map.size(); ++i) hist.add(im.map[i], im.mask[i]);
      }
      summary = summarize_histogram(hist);
    } else {
      std::size_t n_pos = 0;
      std::size_t n_all = 0;
      for (const auto& im : set.images) {
        n_pos += im.mask.count();
        n_all += im.map.size();
      }
      std::vector<double> pos;
      std::vector<double> neg;
      pos.reserve(n_pos);
      neg.reserve(n_all - n_pos);
      for (const auto& im : set.images) {
        for (std::size_t i = 0; i < im.map.size(); ++i) (im.mask[i] ? pos : neg).push_back(im.map[i]);
      }
      if (pos.empty() || neg.empty()) fail(ErrorCode::kDegenerateLabels, "no anomalous or no normal pixels");
      summary = summarize_split(pos, neg);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateLabels) throw;
    fail(ErrorCode::kPrecondition, "category '" + set.category + "': pixel-level metrics need anomalous and normal pixels");
  }
  return {to_percent(summary), 100.0 * summary.iou.value};
}

/// Pixel AU-ROC / AP / F1-max over the pooled pixels of the whole category.
inline RankingTriple eval_pixel_level(const CategoryEvalSet& set, std::optional<std::size_t> histogram_bins = {}) {
  return eval_pixel_level_full(set, histogram_bins).triple;
}

struct BandResult {
  double mf1 = 0.0;   // percent
  double macc = 0.0;  // percent; anomaly-class accuracy tp / (tp + fn)
  double miou = 0.0;  // percent
};

struct BandPoint {
  double threshold = 0.0;
  ConfusionCounts counts;
  double f1 = 0.0;
  double acc = 0.0;
  double iou = 0.0;
};

/// Per-threshold confusion counts of the pooled pixels, in one pass.
inline std::vector<BandPoint> band_points(const CategoryEvalSet& set, const ThresholdBandConfig& config) {
  const std::vector<double> thresholds = config.thresholds();
  const std::size_t n = thresholds.size();
  // bucket b holds pixels with exactly b thresholds <= score.
  std::vector<std::uint64_t> pos(n + 1, 0);
  std::vector<std::uint64_t> neg(n + 1, 0);
  for (const auto& im : set.images) {
    const auto& s = im.map.scores();
    const auto& g = im.mask.labels();
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::size_t b = 0;
      while (b < n && thresholds[b] <= s[i]) ++b;
      ++(g[i] ? pos : neg)[b];
    }
  }
  std::uint64_t total_pos = 0;
  std::uint64_t total_neg = 0;
  for (std::size_t b = 0; b <= n; ++b) {
    total_pos += pos[b];
    total_neg += neg[b];
  }
  std::vector<BandPoint> points(n);
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t k = n; k-- > 0;) {
    tp += pos[k + 1];
    fp += neg[k + 1];
    BandPoint& p = points[k];
    p.threshold = thresholds[k];
    p.counts = {tp, fp, total_pos - tp, total_neg - fp};
    const auto dtp = static_cast<double>(tp);
    const auto dfp = static_cast<double>(fp);
    const auto dfn = static_cast<double>(total_pos - tp);
    // A zero denominator contributes 0.
    p.f1 = (2 * tp + fp + (total_pos - tp)) == 0 ? 0.0 : 2.0 * dtp / (2.0 * dtp + dfp + dfn);
    p.acc = total_pos == 0 ? 0.0 : dtp / static_cast<double>(total_pos);
    p.iou = (tp + fp + (total_pos - tp)) == 0 ? 0.0 : dtp / (dtp + dfp + dfn);
  }
  return points;
}

inline BandResult eval_threshold_band(const CategoryEvalSet& set, const ThresholdBandConfig& config = {}) {
  const auto points = band_points(set, config);
  BandResult r;
  for (const auto& p : points) {
    r.mf1 += p.f1;
    r.macc += p.acc;
    r.miou += p.iou;
  }
  const double n = static_cast<double>(points.size());
  return {100.0 * r.mf1 / n, 100.0 * r.macc / n, 100.0 * r.miou / n};
}

inline double eval_aupro(const CategoryEvalSet& set, double fpr_cap = 0.3, ProFprMode mode = ProFprMode::kPooled,
                         Connectivity connectivity = Connectivity::kEight) {
  std::vector<ProImage> images;
  images.reserve(set.images.size());
  for (const auto& im : set.images) images.push_back({&im.map, &im.mask, connected_components(im.mask, connectivity)});
  try {
    return 100.0 * pro_auc(images, fpr_cap, mode);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kPrecondition) throw;
    fail(ErrorCode::kPrecondition, "category '" + set.category + "': " + e.what());
  }
}

/// Every metric of one category. `set` must already be normalized.
inline MetricRecord evaluate_normalized_category(const CategoryEvalSet& set, const EvalOptions& options = {}) {
  const RankingTriple image = eval_image_level(set, options.image_score);
  const PixelLevelResult pixel = eval_pixel_level_full(set, options.histogram_bins);
  const BandResult band = eval_threshold_band(set, options.band);
  const double aupro = eval_aupro(set, options.fpr_cap, options.pro_mode, options.connectivity);
  return assemble_record({image.auroc, image.ap, image.f1max, aupro, pixel.triple.auroc, pixel.triple.ap,
                          pixel.triple.f1max, band.mf1, band.macc, band.miou, pixel.ioumax});
}

/// Normalizes per category, then evaluates.
inline MetricRecord evaluate_category(const CategoryEvalSet& set, const EvalOptions& options = {},
                                      std::vector<std::string>* warnings = nullptr) {
  return evaluate_normalized_category(normalize_category_scores(set, warnings), options);
}

}  // namespace adbench
