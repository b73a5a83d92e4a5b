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

// Style-modulated standardization: a style feature predicts a per-pixel
// scale and shift that are applied to an instance-standardized feature.

#pragma once

#include "adbench/invad/ops.hpp"

namespace adbench::invad {

/// Intermediate values kept for the backward pass.
template <typename T>
struct BasicSsmTrace {
  BasicTensor4<T> input;  // f-o before optional upsampling
  BasicTensor4<T> xhat;
  BasicInstanceStats<T> stats;
  BasicTensor4<T> scale;
  BasicTensor4<T> style;
};

using SsmTrace = BasicSsmTrace<double>;

/// scale_conv(style) * standardize(f_o) + shift_conv(style). When `upsample`
/// is given, f_o first passes through that transposed 3x3 stride-2 conv.
template <typename T>
BasicTensor4<T> ssm_apply(const BasicTensor4<T>& f_o, const BasicTensor4<T>& style,
                          const BasicConvParams<T>& scale_conv,
                          const BasicConvParams<T>& shift_conv, double epsilon,
                          const BasicConvParams<T>* upsample = nullptr,
                          BasicSsmTrace<T>* trace = nullptr) {
  BasicTensor4<T> h = upsample ? deconv_k3s2(f_o, *upsample) : f_o;
  if (style.n() != h.n() || style.h() != h.h() || style.w() != h.w())
    throw Error(ErrorCode::kShapeMismatch,
                "style " + style.shape_string() + " vs feature " + h.shape_string());
  BasicTensor4<T> scale = conv2d(style, scale_conv);
  BasicTensor4<T> shift = conv2d(style, shift_conv);
  if (!scale.same_shape(h) || !shift.same_shape(h))
    throw Error(ErrorCode::kShapeMismatch,
                "modulation " + scale.shape_string() + " vs feature " + h.shape_string());
  BasicInstanceStats<T> st = instance_stats(h, epsilon);
  BasicTensor4<T> xhat = standardize(h, st);
  BasicTensor4<T> out = std::move(shift);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale[i] * xhat[i];
  if (trace) {
    trace->input = f_o;
    trace->xhat = std::move(xhat);
    trace->stats = std::move(st);
    trace->scale = std::move(scale);
    trace->style = style;
  }
  return out;
}

template <typename T>
struct BasicSsmGrads {
  BasicTensor4<T> input;
  BasicTensor4<T> style;
};

template <typename T>
BasicSsmGrads<T> ssm_backward(const BasicSsmTrace<T>& t, const BasicConvParams<T>& scale_conv,
                              const BasicConvParams<T>& shift_conv,
                              const BasicConvParams<T>* upsample, const BasicTensor4<T>& dout,
                              BasicConvParams<T>& g_scale, BasicConvParams<T>& g_shift,
                              BasicConvParams<T>* g_upsample) {
  BasicTensor4<T> dscale = dout;
  BasicTensor4<T> dxhat = dout;
  for (std::size_t i = 0; i < dout.size(); ++i) {
    dscale[i] *= t.xhat[i];
    dxhat[i] *= t.scale[i];
  }
  BasicSsmGrads<T> g;
  g.style = conv2d_backward(t.style, scale_conv, dscale, g_scale);
  g.style += conv2d_backward(t.style, shift_conv, dout, g_shift);
  BasicTensor4<T> dh = standardize_backward(t.xhat, t.stats, dxhat);
  g.input = upsample ? deconv_k3s2_backward(t.input, *upsample, dh, *g_upsample) : std::move(dh);
  return g;
}

}  // namespace adbench::invad
