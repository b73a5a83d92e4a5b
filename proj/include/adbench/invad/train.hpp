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

// Training (AdamW with decoupled weight decay), finite-difference gradient
// verification and cosine-distance anomaly maps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "adbench/data/types.hpp"
#include "adbench/invad/model.hpp"
#include "adbench/parallel.hpp"

namespace adbench::invad {

struct AdamWOptions {
  double lr = 1e-4;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline void adamw_step(InvadState& st, Generator& grad, const AdamWOptions& o) {
  ++st.step;
  const double t = static_cast<double>(st.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  auto p = parameters(st.generator);
  auto g = parameters(grad);
  auto m = parameters(st.first_moment);
  auto v = parameters(st.second_moment);
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto& pv = *p[k].values;
    const auto& gv = *g[k].values;
    auto& mv = *m[k].values;
    auto& vv = *v[k].values;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      pv[i] *= 1.0 - o.lr * o.weight_decay;
      mv[i] = o.beta1 * mv[i] + (1.0 - o.beta1) * gv[i];
      vv[i] = o.beta2 * vv[i] + (1.0 - o.beta2) * gv[i] * gv[i];
      pv[i] -= o.lr * (mv[i] / c1) / (std::sqrt(vv[i] / c2) + o.eps);
    }
  }
}

/// Batch-mean loss and its parameter gradient. Per-sample gradients are
/// summed in sample order, so the result does not depend on `workers`.
template <typename T>
T loss_and_gradient(const BasicInvadState<T>& st, const BasicTensor4<T>& images,
                    BasicGenerator<T>* grad, std::size_t workers = 1) {
  const std::size_t batch = images.n();
  if (batch == 0) throw Error(ErrorCode::kShapeMismatch, "empty batch");
  std::vector<T> losses(batch);
  std::vector<BasicGenerator<T>> grads(grad ? batch : 0);
  parallel_for(batch, workers, [&](std::size_t n) {
    BasicForwardTrace<T> t = forward_sample(st, detail::take_sample(images, n));
    losses[n] = loss_mse(t.encoder, t.decoder);
    if (grad) {
      grads[n] = zeros_like(st.generator);
      backward_sample(st, t,
                      loss_mse_gradient(t.encoder, t.decoder, T(1) / static_cast<T>(batch)),
                      grads[n]);
    }
  });
  T loss = 0;
  for (T l : losses) loss += l;
  loss /= static_cast<T>(batch);
  if (grad) {
    *grad = zeros_like(st.generator);
    auto dst = parameters(*grad);
    for (auto& gn : grads) {
      auto src = parameters(gn);
      for (std::size_t k = 0; k < dst.size(); ++k)
        for (std::size_t i = 0; i < dst[k].values->size(); ++i)
          (*dst[k].values)[i] += (*src[k].values)[i];
    }
  }
  return loss;
}

/// One optimizer step on a batch; returns the pre-step loss.
inline double backward_and_step(InvadState& st, const Tensor4& images,
                                const AdamWOptions& opt = {},
                                std::size_t workers = 1) {
  Generator grad;
  const double loss = loss_and_gradient(st, images, &grad, workers);
  if (!std::isfinite(loss))
    throw Error(ErrorCode::kDivergence, "non-finite training loss");
  adamw_step(st, grad, opt);
  return loss;
}

struct GradCheckOptions {
  std::size_t probes_per_group = 64;
  double step = 1e-5;
  std::uint64_t seed = 0;
  // Fault injection for self-tests of the checker.
  std::string negate_group;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::map<std::string, double> group_error;
  std::size_t probes = 0;
};

/// Compares analytic gradients (double) with central differences on randomly
/// chosen parameters of every trainable group. The difference quotients are
/// evaluated in long double so that cancellation in L(w+h) - L(w-h) does not
/// dominate the comparison.
inline GradCheckReport grad_check(const InvadState& st, const Tensor4& images,
                                  const GradCheckOptions& opt = {}) {
  using Wide = long double;
  Generator grad;
  loss_and_gradient(st, images, &grad);
  BasicInvadState<Wide> probe = st.cast<Wide>();
  const BasicTensor4<Wide> wide_images = images.cast<Wide>();
  auto params = parameters(probe.generator);
  auto grads = parameters(grad);
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> slots;
  for (std::size_t k = 0; k < params.size(); ++k)
    for (std::size_t i = 0; i < params[k].values->size(); ++i)
      slots[params[k].group].push_back({k, i});

  std::mt19937_64 rng(opt.seed);
  GradCheckReport report;
  for (auto& [group, all] : slots) {
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    std::sample(all.begin(), all.end(), std::back_inserter(chosen),
                std::min(opt.probes_per_group, all.size()), rng);
    double worst = 0.0;
    for (auto [k, i] : chosen) {
      Wide& w = (*params[k].values)[i];
      const Wide saved = w;
      const Wide h = static_cast<Wide>(opt.step);
      w = saved + h;
      const Wide up = loss_and_gradient<Wide>(probe, wide_images, nullptr);
      w = saved - h;
      const Wide down = loss_and_gradient<Wide>(probe, wide_images, nullptr);
      w = saved;
      const double numeric = static_cast<double>((up - down) / (2 * h));
      double analytic = (*grads[k].values)[i];
      if (group == opt.negate_group) analytic = -analytic;
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
      ++report.probes;
    }
    report.group_error[group] = worst;
    report.max_relative_error = std::max(report.max_relative_error, worst);
  }
  return report;
}

enum class StageReduce { kMean, kSum };

/// Bilinear resize with half-pixel centres (edge-clamped).
inline std::vector<double> resize_bilinear(const double* src, std::size_t h,
                                           std::size_t w, std::size_t oh,
                                           std::size_t ow) {
  std::vector<double> out(oh * ow);
  const double sy = static_cast<double>(h) / static_cast<double>(oh);
  const double sx = static_cast<double>(w) / static_cast<double>(ow);
  for (std::size_t y = 0; y < oh; ++y) {
    const double fy = std::max((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0);
    const std::size_t y0 = std::min(static_cast<std::size_t>(fy), h - 1);
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double ly = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < ow; ++x) {
      const double fx = std::max((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0);
      const std::size_t x0 = std::min(static_cast<std::size_t>(fx), w - 1);
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double lx = fx - static_cast<double>(x0);
      out[y * ow + x] = (1 - ly) * ((1 - lx) * src[y0 * w + x0] + lx * src[y0 * w + x1]) +
                        ly * ((1 - lx) * src[y1 * w + x0] + lx * src[y1 * w + x1]);
    }
  }
  return out;
}

/// 1 - cosine similarity of channel vectors; a zero vector has distance 1.
inline std::vector<double> cosine_distance(const Tensor4& a, const Tensor4& b,
                                           std::size_t n) {
  const std::size_t hw = a.plane();
  std::vector<double> out(hw);
  const double* pa = a.sample(n);
  const double* pb = b.sample(n);
  for (std::size_t i = 0; i < hw; ++i) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t c = 0; c < a.c(); ++c) {
      const double x = pa[c * hw + i], y = pb[c * hw + i];
      ab += x * y;
      aa += x * x;
      bb += y * y;
    }
    const double norm = std::sqrt(aa * bb);
    out[i] = norm > 0.0 ? std::clamp(1.0 - ab / norm, 0.0, 2.0) : 1.0;
  }
  return out;
}

/// Per-sample anomaly maps at output resolution.
inline std::vector<ScoreMap> anomaly_map(const std::vector<Tensor4>& f_i,
                                         const std::vector<Tensor4>& f_o,
                                         std::size_t height, std::size_t width,
                                         StageReduce reduce = StageReduce::kMean) {
  if (f_i.size() != f_o.size() || f_i.empty())
    throw Error(ErrorCode::kShapeMismatch, "stage counts differ");
  for (std::size_t s = 0; s < f_i.size(); ++s) {
    f_i[s].require_same(f_o[s], "anomaly map");
    if (f_i[s].n() != f_i[0].n())
      throw Error(ErrorCode::kShapeMismatch, "batch sizes differ across stages");
  }
  std::vector<ScoreMap> maps;
  for (std::size_t n = 0; n < f_i[0].n(); ++n) {
    std::vector<double> acc(height * width, 0.0);
    for (std::size_t s = 0; s < f_i.size(); ++s) {
      const auto d = cosine_distance(f_i[s], f_o[s], n);
      const auto up = resize_bilinear(d.data(), f_i[s].h(), f_i[s].w(), height, width);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += up[i];
    }
    if (reduce == StageReduce::kMean)
      for (auto& v : acc) v /= static_cast<double>(f_i.size());
    maps.emplace_back(height, width, std::move(acc));
  }
  return maps;
}

/// Anomaly maps of a batch under the current state.
inline std::vector<ScoreMap> infer(const InvadState& st, const Tensor4& images,
                                   StageReduce reduce = StageReduce::kMean) {
  const PipelineOutput out = pipeline_forward(images, st);
  return anomaly_map(out.encoder, out.decoder, images.h(), images.w(), reduce);
}

}  // namespace adbench::invad
