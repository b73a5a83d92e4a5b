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
#include <cstddef>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adbench/error.hpp"

namespace adbench {

/// All values in percent. Field order mirrors the usual benchmark table:
/// image triple, AU-PRO, pixel triple, threshold-band quadruple, aggregates.
struct MetricRecord {
  double image_auroc = 0.0;
  double image_ap = 0.0;
  double image_f1max = 0.0;
  double aupro = 0.0;
  double pixel_auroc = 0.0;
  double pixel_ap = 0.0;
  double pixel_f1max = 0.0;
  double mf1_band = 0.0;
  double macc_band = 0.0;
  double miou_band = 0.0;
  double ioumax = 0.0;
  double mad_i = 0.0;
  double mad_p = 0.0;
  double mad_band = 0.0;

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

struct MetricField {
  const char* key;
  const char* label;
  double MetricRecord::*member;
};

inline constexpr MetricField kMetricFields[] = {
    {"image_auroc", "I-AU-ROC", &MetricRecord::image_auroc},
    {"image_ap", "I-AP", &MetricRecord::image_ap},
    {"image_f1max", "I-F1-max", &MetricRecord::image_f1max},
    {"aupro", "AU-PRO", &MetricRecord::aupro},
    {"pixel_auroc", "P-AU-ROC", &MetricRecord::pixel_auroc},
    {"pixel_ap", "P-AP", &MetricRecord::pixel_ap},
    {"pixel_f1max", "P-F1-max", &MetricRecord::pixel_f1max},
    {"mf1_band", "mF1(.2-.8)", &MetricRecord::mf1_band},
    {"macc_band", "mAcc(.2-.8)", &MetricRecord::macc_band},
    {"miou_band", "mIoU(.2-.8)", &MetricRecord::miou_band},
    {"ioumax", "IoU-max", &MetricRecord::ioumax},
    {"mad_i", "mAD_I", &MetricRecord::mad_i},
    {"mad_p", "mAD_P", &MetricRecord::mad_p},
    {"mad_band", "mAD(.2-.8)", &MetricRecord::mad_band},
};

/// The eleven measured metrics, in percent.
struct MetricParts {
  double image_auroc, image_ap, image_f1max;
  double aupro;
  double pixel_auroc, pixel_ap, pixel_f1max;
  double mf1_band, macc_band, miou_band;
  double ioumax;
};

inline MetricRecord assemble_record(const MetricParts& p) {
  MetricRecord r;
  r.image_auroc = p.image_auroc;
  r.image_ap = p.image_ap;
  r.image_f1max = p.image_f1max;
  r.aupro = p.aupro;
  r.pixel_auroc = p.pixel_auroc;
  r.pixel_ap = p.pixel_ap;
  r.pixel_f1max = p.pixel_f1max;
  r.mf1_band = p.mf1_band;
  r.macc_band = p.macc_band;
  r.miou_band = p.miou_band;
  r.ioumax = p.ioumax;
  r.mad_i = (p.image_auroc + p.image_ap + p.image_f1max) / 3.0;
  r.mad_p = (p.pixel_auroc + p.pixel_ap + p.pixel_f1max) / 3.0;
  r.mad_band = (p.mf1_band + p.macc_band + p.miou_band) / 3.0;
  return r;
}

/// Unweighted per-field mean over categories.
inline MetricRecord aggregate_dataset(const std::vector<MetricRecord>& records) {
  if (records.empty()) fail(ErrorCode::kInvalidArgument, "cannot aggregate an empty record list");
  MetricRecord mean;
  for (const auto& f : kMetricFields) {
    double sum = 0.0;
    for (const auto& r : records) sum += r.*f.member;
    mean.*f.member = sum / static_cast<double>(records.size());
  }
  return mean;
}

/// Presentation rounding. The 1e-9 nudge keeps decimal ties such as 27.35
/// (stored as 27.349999...) rounding up.
inline double round_half_up(double value, int decimals = 1) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

inline std::string format_fixed(double value, int decimals = 1) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << round_half_up(value, decimals);
  return out.str();
}

inline void to_json(nlohmann::json& j, const MetricRecord& r) {
  j = nlohmann::json::object();
  for (const auto& f : kMetricFields) j[f.key] = r.*f.member;
}

inline void from_json(const nlohmann::json& j, MetricRecord& r) {
  for (const auto& f : kMetricFields) r.*f.member = j.at(f.key).get<double>();
}

/// Sample Pearson correlation.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorCode::kShapeMismatch, "pearson needs equal-length vectors");
  if (x.size() < 2) fail(ErrorCode::kInvalidArgument, "pearson needs at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::kPrecondition, "pearson is undefined for zero-variance input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace adbench
