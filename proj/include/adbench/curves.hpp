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

// Ranking-curve machinery: exact threshold sweeps, AU-ROC, step-sum AP,
// best-threshold F1/IoU, the per-region-overlap curve and a quantized
// histogram path for very large pixel sets.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "adbench/data/types.hpp"
#include "adbench/error.hpp"
#include "adbench/maskops.hpp"

namespace adbench {

/// Cumulative counts at each distinct score, highest score first. A sample is
/// predicted positive at threshold t iff its score >= t.
struct RankedCurve {
  std::vector<double> thresholds;
  std::vector<std::uint64_t> cum_tp;
  std::vector<std::uint64_t> cum_fp;
  std::uint64_t total_pos = 0;
  std::uint64_t total_neg = 0;
};

namespace detail {

inline void check_ranking_inputs(std::size_t n_scores, std::size_t n_labels) {
  if (n_scores != n_labels) {
    fail(ErrorCode::kShapeMismatch, "got " + std::to_string(n_scores) + " scores but " +
                                        std::to_string(n_labels) + " labels");
  }
}

// Visits (threshold, cum_tp, cum_fp) for every distinct score in descending
// order. Positives and negatives are sorted separately and merged, which keeps
// the working set at one double per sample.
template <typename Visitor>
void sweep_sorted(const std::vector<double>& pos, const std::vector<double>& neg, Visitor&& visit) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < pos.size() || j < neg.size()) {
    double t;
    if (i == pos.size()) t = neg[j];
    else if (j == neg.size()) t = pos[i];
    else t = std::max(pos[i], neg[j]);
    while (i < pos.size() && pos[i] == t) ++i;
    while (j < neg.size() && neg[j] == t) ++j;
    visit(t, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
  }
}

template <typename Visitor>
void sweep_thresholds(std::span<const double> scores, std::span<const std::uint8_t> labels, Visitor&& visit) {
  check_ranking_inputs(scores.size(), labels.size());
  std::vector<double> pos;
  std::vector<double> neg;
  std::size_t n_pos = 0;
  for (auto l : labels) n_pos += l ? 1 : 0;
  pos.reserve(n_pos);
  neg.reserve(labels.size() - n_pos);
  for (std::size_t k = 0; k < scores.size(); ++k) (labels[k] ? pos : neg).push_back(scores[k]);
  if (pos.empty() || neg.empty()) {
    fail(ErrorCode::kDegenerateLabels, "ranking metrics need at least one positive and one negative sample");
  }
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  sweep_sorted(pos, neg, visit);
}

}  // namespace detail

inline RankedCurve rank_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  RankedCurve curve;
  detail::sweep_thresholds(scores, labels, [&](double t, std::uint64_t tp, std::uint64_t fp) {
    curve.thresholds.push_back(t);
    curve.cum_tp.push_back(tp);
    curve.cum_fp.push_back(fp);
  });
  curve.total_pos = curve.cum_tp.back();
  curve.total_neg = curve.cum_fp.back();
  return curve;
}

inline RankedCurve rank_curve(const std::vector<double>& scores, const std::vector<bool>& labels) {
  std::vector<std::uint8_t> bytes(labels.begin(), labels.end());
  return rank_curve(std::span<const double>(scores), std::span<const std::uint8_t>(bytes));
}

enum class ThresholdMetric { kF1, kIoU };

struct BestThreshold {
  double value = 0.0;
  double threshold = 0.0;
};

/// Single-pass accumulator for every curve metric. Points must arrive in
/// descending threshold order.
class CurveAccumulator {
 public:
  CurveAccumulator(std::uint64_t total_pos, std::uint64_t total_neg) : pos_(total_pos), neg_(total_neg) {
    if (pos_ == 0 || neg_ == 0) {
      fail(ErrorCode::kDegenerateLabels, "ranking metrics need at least one positive and one negative sample");
    }
  }

  void add(double threshold, std::uint64_t tp, std::uint64_t fp) {
    const auto dtp = static_cast<double>(tp - prev_tp_);
    const auto dfp = static_cast<double>(fp - prev_fp_);
    roc_twice_ += dfp * static_cast<double>(tp + prev_tp_);
    if (tp > prev_tp_) ap_ += dtp * static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double fn = static_cast<double>(pos_ - tp);
    const double dtp_total = static_cast<double>(tp);
    const double f1 = 2.0 * dtp_total / (2.0 * dtp_total + static_cast<double>(fp) + fn);
    const double iou = dtp_total / (dtp_total + static_cast<double>(fp) + fn);
    if (f1 > best_f1_.value) best_f1_ = {f1, threshold};
    if (iou > best_iou_.value) best_iou_ = {iou, threshold};
    prev_tp_ = tp;
    prev_fp_ = fp;
  }

  double auroc() const { return roc_twice_ / (2.0 * static_cast<double>(pos_) * static_cast<double>(neg_)); }
  double average_precision() const { return ap_ / static_cast<double>(pos_); }
  BestThreshold best(ThresholdMetric metric) const { return metric == ThresholdMetric::kF1 ? best_f1_ : best_iou_; }

 private:
  std::uint64_t pos_;
  std::uint64_t neg_;
  std::uint64_t prev_tp_ = 0;
  std::uint64_t prev_fp_ = 0;
  double roc_twice_ = 0.0;
  double ap_ = 0.0;
  BestThreshold best_f1_;
  BestThreshold best_iou_;
};

inline CurveAccumulator accumulate(const RankedCurve& curve) {
  CurveAccumulator acc(curve.total_pos, curve.total_neg);
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) acc.add(curve.thresholds[k], curve.cum_tp[k], curve.cum_fp[k]);
  return acc;
}

/// Trapezoidal area under TPR vs FPR, from (0,0) to (1,1). Ties contribute a
/// diagonal segment, so the result equals P(s+ > s-) + P(s+ == s-)/2.
inline double auroc(const RankedCurve& curve) { return accumulate(curve).auroc(); }

/// Step-sum estimator sum_n (R_n - R_{n-1}) P_n, no interpolation.
inline double average_precision(const RankedCurve& curve) { return accumulate(curve).average_precision(); }

/// Maximum F1 = 2tp/(2tp+fp+fn) or IoU = tp/(tp+fp+fn) over all curve
/// thresholds. Ties resolve to the larger threshold.
inline BestThreshold best_threshold_metric(const RankedCurve& curve, ThresholdMetric metric) {
  return accumulate(curve).best(metric);
}

/// All ranking metrics of a pooled sample set in one sort-and-sweep pass.
struct RankingSummary {
  double auroc = 0.0;
  double average_precision = 0.0;
  BestThreshold f1;
  BestThreshold iou;
};

inline RankingSummary summarize_ranking(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  detail::check_ranking_inputs(scores.size(), labels.size());
  std::uint64_t n_pos = 0;
  for (auto l : labels) n_pos += l ? 1 : 0;
  if (n_pos == 0 || n_pos == labels.size()) {
    fail(ErrorCode::kDegenerateLabels, "ranking metrics need at least one positive and one negative sample");
  }
  CurveAccumulator acc(n_pos, labels.size() - n_pos);
  detail::sweep_thresholds(scores, labels, [&](double t, std::uint64_t tp, std::uint64_t fp) { acc.add(t, tp, fp); });
  return {acc.auroc(), acc.average_precision(), acc.best(ThresholdMetric::kF1), acc.best(ThresholdMetric::kIoU)};
}

/// Same as summarize_ranking for samples already split by label. Sorts in place.
inline RankingSummary summarize_split(std::vector<double>& pos, std::vector<double>& neg) {
  CurveAccumulator acc(pos.size(), neg.size());
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  detail::sweep_sorted(pos, neg, [&](double t, std::uint64_t tp, std::uint64_t fp) { acc.add(t, tp, fp); });
  return {acc.auroc(), acc.average_precision(), acc.best(ThresholdMetric::kF1), acc.best(ThresholdMetric::kIoU)};
}

// ---------------------------------------------------------------------------
// Per-region overlap

enum class ProFprMode {
  kPooled,    // FPR over all non-anomalous pixels of all images together
  kPerImage,  // FPR averaged over images that have non-anomalous pixels
};

/// One image of a PRO evaluation. `regions` are the ground-truth components of `gt`.
struct ProImage {
  const ScoreMap* map = nullptr;
  const BinaryMask* gt = nullptr;
  std::vector<Region> regions;
};

namespace detail {

// Neumaier-compensated running sum; PRO adds one small weight per region pixel.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Integrates a piecewise-linear curve starting at (0,0) up to x = cap.
class CappedTrapezoid {
 public:
  explicit CappedTrapezoid(double cap) : cap_(cap) {}

  void add(double x, double y) {
    if (done_) return;
    if (x <= cap_) {
      area_ += (x - x0_) * (y0_ + y) / 2.0;
      x0_ = x;
      y0_ = y;
      if (x == cap_) done_ = true;
      return;
    }
    const double y_cap = y0_ + (y - y0_) * (cap_ - x0_) / (x - x0_);
    area_ += (cap_ - x0_) * (y0_ + y_cap) / 2.0;
    done_ = true;
  }
  double area() const { return area_; }

 private:
  double cap_;
  double x0_ = 0.0;
  double y0_ = 0.0;
  double area_ = 0.0;
  bool done_ = false;
};

}  // namespace detail

/// Area under PRO vs FPR on [0, fpr_cap], divided by fpr_cap. PRO(t) is the
/// mean over every ground-truth region of the fraction of its pixels scoring
/// >= t, so each region weighs the same regardless of size.
inline double pro_auc(std::span<const ProImage> images, double fpr_cap = 0.3,
                      ProFprMode mode = ProFprMode::kPooled) {
  if (!(fpr_cap > 0.0) || fpr_cap > 1.0) fail(ErrorCode::kInvalidArgument, "FPR cap must lie in (0, 1]");
  std::size_t region_total = 0;
  for (const auto& im : images) {
    if (im.map == nullptr || im.gt == nullptr) fail(ErrorCode::kInvalidArgument, "PRO image is missing its map or mask");
    if (im.map->height() != im.gt->height() || im.map->width() != im.gt->width()) {
      fail(ErrorCode::kShapeMismatch, "score map and ground truth differ in size");
    }
    region_total += im.regions.size();
  }
  if (region_total == 0) fail(ErrorCode::kPrecondition, "AU-PRO needs at least one ground-truth region");

  // (score, weight) events; weights of region pixels sum to 1 over all regions.
  std::vector<std::pair<double, double>> region_events;
  const double inv_regions = 1.0 / static_cast<double>(region_total);
  for (const auto& im : images) {
    for (const auto& region : im.regions) {
      const double w = inv_regions / static_cast<double>(region.area);
      for (auto p : region.pixels) region_events.emplace_back((*im.map)[p], w);
    }
  }

  std::vector<std::pair<double, double>> normal_events;
  std::uint64_t normal_total = 0;
  std::size_t images_with_normals = 0;
  for (const auto& im : images) {
    const std::size_t normals = im.gt->size() - im.gt->count();
    normal_total += normals;
    images_with_normals += normals > 0 ? 1 : 0;
  }
  if (normal_total == 0) fail(ErrorCode::kPrecondition, "AU-PRO needs at least one non-anomalous pixel");
  normal_events.reserve(normal_total);
  for (const auto& im : images) {
    const std::size_t normals = im.gt->size() - im.gt->count();
    if (normals == 0) continue;
    const double w = mode == ProFprMode::kPooled
                         ? 1.0
                         : 1.0 / (static_cast<double>(normals) * static_cast<double>(images_with_normals));
    for (std::size_t i = 0; i < im.gt->size(); ++i) {
      if (!(*im.gt)[i]) normal_events.emplace_back((*im.map)[i], w);
    }
  }

  auto by_score_desc = [](const auto& a, const auto& b) { return a.first > b.first; };
  std::sort(region_events.begin(), region_events.end(), by_score_desc);
  std::sort(normal_events.begin(), normal_events.end(), by_score_desc);

  detail::CappedTrapezoid integral(fpr_cap);
  detail::CompensatedSum pro;
  detail::CompensatedSum fp_weight;
  std::uint64_t fp_count = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < region_events.size() || j < normal_events.size()) {
    double t;
    if (i == region_events.size()) t = normal_events[j].first;
    else if (j == normal_events.size()) t = region_events[i].first;
    else t = std::max(region_events[i].first, normal_events[j].first);
    for (; i < region_events.size() && region_events[i].first == t; ++i) pro.add(region_events[i].second);
    for (; j < normal_events.size() && normal_events[j].first == t; ++j) {
      ++fp_count;
      fp_weight.add(normal_events[j].second);
    }
    const double fpr = mode == ProFprMode::kPooled
                           ? static_cast<double>(fp_count) / static_cast<double>(normal_total)
                           : (j == normal_events.size() ? 1.0 : fp_weight.value());
    integral.add(fpr, pro.value());
  }
  return integral.area() / fpr_cap;
}

// ---------------------------------------------------------------------------
// Quantized path

/// Uniform histogram over [0, 1]; bin k covers [k/B, (k+1)/B), the last bin
/// also takes 1.0.
struct ScoreHistogram {
  std::size_t bin_count = 0;
  std::vector<std::uint64_t> pos_counts;
  std::vector<std::uint64_t> neg_counts;

  ScoreHistogram() = default;
  explicit ScoreHistogram(std::size_t bins) : bin_count(bins), pos_counts(bins, 0), neg_counts(bins, 0) {
    if (bins < 2) fail(ErrorCode::kInvalidArgument, "histogram needs at least 2 bins");
  }

  std::size_t bin_of(double score) const {
    if (!(score >= 0.0 && score <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "histogram scores must lie in [0, 1], got " + std::to_string(score));
    }
    const auto k = static_cast<std::size_t>(score * static_cast<double>(bin_count));
    return std::min(k, bin_count - 1);
  }
  double lower_edge(std::size_t bin) const { return static_cast<double>(bin) / static_cast<double>(bin_count); }

  void add(double score, bool positive) { ++(positive ? pos_counts : neg_counts)[bin_of(score)]; }

  /// Partial histograms merge associatively.
  ScoreHistogram& merge(const ScoreHistogram& other) {
    if (other.bin_count != bin_count) fail(ErrorCode::kShapeMismatch, "cannot merge histograms with different bin counts");
    for (std::size_t k = 0; k < bin_count; ++k) {
      pos_counts[k] += other.pos_counts[k];
      neg_counts[k] += other.neg_counts[k];
    }
    return *this;
  }

  std::uint64_t total_pos() const { std::uint64_t n = 0; for (auto c : pos_counts) n += c; return n; }
  std::uint64_t total_neg() const { std::uint64_t n = 0; for (auto c : neg_counts) n += c; return n; }
};

inline ScoreHistogram quantize_scores(std::span<const double> scores, std::span<const std::uint8_t> labels,
                                      std::size_t bin_count) {
  detail::check_ranking_inputs(scores.size(), labels.size());
  ScoreHistogram hist(bin_count);
  for (std::size_t k = 0; k < scores.size(); ++k) hist.add(scores[k], labels[k] != 0);
  return hist;
}

/// Treats each non-empty bin as one tied threshold at its lower edge.
inline RankedCurve histogram_curve(const ScoreHistogram& hist) {
  RankedCurve curve;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t k = hist.bin_count; k-- > 0;) {
    if (hist.pos_counts[k] == 0 && hist.neg_counts[k] == 0) continue;
    tp += hist.pos_counts[k];
    fp += hist.neg_counts[k];
    curve.thresholds.push_back(hist.lower_edge(k));
    curve.cum_tp.push_back(tp);
    curve.cum_fp.push_back(fp);
  }
  curve.total_pos = tp;
  curve.total_neg = fp;
  if (tp == 0 || fp == 0) {
    fail(ErrorCode::kDegenerateLabels, "ranking metrics need at least one positive and one negative sample");
  }
  return curve;
}

inline RankingSummary summarize_histogram(const ScoreHistogram& hist) {
  const CurveAccumulator acc = accumulate(histogram_curve(hist));
  return {acc.auroc(), acc.average_precision(), acc.best(ThresholdMetric::kF1), acc.best(ThresholdMetric::kIoU)};
}

}  // namespace adbench
