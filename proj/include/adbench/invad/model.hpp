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

// Feature-inversion generator on top of a frozen strided-conv encoder.
//
//   image -> encoder stages (frozen) -> F^I[s]
//   F^I    -> neck (stride-2 convs, concat, bottlenecks) -> fused
//   fused  -> upsampler blocks -> rescaled[s]
//   rescaled[s] -> style translator -> style[s]
//   learned constant -> per-stage SSM stacks driven by style[s] -> F^O[s]
//
// Stage 0 is the shallowest (H/2); stage S-1 the deepest (H/2^S). The neck
// output sits one level below the deepest stage.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adbench/invad/ops.hpp"
#include "adbench/invad/ssm.hpp"

namespace adbench::invad {

struct PipelineConfig {
  std::size_t n_b = 1;   // bottlenecks in the neck
  std::size_t n_c = 1;   // convs after each upsampling conv
  std::size_t n_l = 2;   // SSM modules per decoder stage
  std::size_t n_r = 64;  // rescaled channels
  std::size_t n_s = 16;  // style channels
  std::size_t stages = 3;
  bool use_style = true;
  bool use_ssm = true;
  double epsilon = 1e-5;
  std::size_t in_channels = 3;
  std::size_t base_channels = 8;  // encoder stage s has base * 2^s channels
  Activation activation = Activation::kSilu;
  std::size_t kernel = 3;  // stride-1 convs; stride-2 ones are always 3x3

  std::size_t encoder_channels(std::size_t stage) const {
    return base_channels << stage;
  }
  std::size_t style_channels() const { return use_style ? n_s : n_r; }

  void validate() const {
    if (n_b < 1 || n_c < 1 || n_l < 1 || n_r < 1 || n_s < 1 || stages < 1 ||
        in_channels < 1 || base_channels < 1)
      throw Error(ErrorCode::kInvalidArgument, "pipeline counts must be >= 1");
    if (kernel % 2 == 0)
      throw Error(ErrorCode::kInvalidArgument, "kernel size must be odd");
    if (!(epsilon > 0.0))
      throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }

  /// Input height and width must be multiples of this.
  std::size_t size_multiple() const { return std::size_t{1} << (stages + 1); }
};

template <typename T>
struct Bottleneck {
  BasicConvParams<T> a, b;  // y = x + b(act(a(x)))
};

template <typename T>
struct UpBlock {
  BasicConvParams<T> up;  // transposed k3s2
  std::vector<BasicConvParams<T>> convs;
};

template <typename T>
struct StyleTranslator {
  BasicConvParams<T> a, b;
};

template <typename T>
struct SsmModule {
  BasicConvParams<T> upsample;  // empty unless the module doubles resolution
  BasicConvParams<T> scale, shift;
  BasicConvParams<T> fuse;  // concatenation variant only
};

/// All trainable parameters. Gradients and optimizer moments reuse the type.
template <typename T>
struct BasicGenerator {
  std::vector<std::vector<BasicConvParams<T>>> neck_down;  // per stage, to deepest
  BasicConvParams<T> neck_fuse;
  std::vector<Bottleneck<T>> bottlenecks;
  std::vector<UpBlock<T>> upsampler;       // block j feeds stage S-1-j
  std::vector<StyleTranslator<T>> styles;  // per stage
  std::vector<std::vector<SsmModule<T>>> decoder;  // per stage
  BasicTensor4<T> constant;
};

using Generator = BasicGenerator<double>;

template <typename T>
struct ParamRef {
  const char* group;
  std::vector<T>* values;
};

/// Trainable tensors in a fixed order; identical layout for any two
/// generators built from the same config.
template <typename T>
std::vector<ParamRef<T>> parameters(BasicGenerator<T>& g) {
  std::vector<ParamRef<T>> out;
  auto add = [&](const char* group, BasicConvParams<T>& p) {
    if (p.empty()) return;
    out.push_back({group, &p.weight.values()});
    out.push_back({group, &p.bias});
  };
  for (auto& chain : g.neck_down)
    for (auto& p : chain) add("neck", p);
  add("neck", g.neck_fuse);
  for (auto& b : g.bottlenecks) {
    add("neck", b.a);
    add("neck", b.b);
  }
  for (auto& u : g.upsampler) {
    add("upsampler", u.up);
    for (auto& c : u.convs) add("upsampler", c);
  }
  for (auto& s : g.styles) {
    add("style", s.a);
    add("style", s.b);
  }
  for (auto& stage : g.decoder)
    for (auto& m : stage) {
      add("ssm", m.upsample);
      add("ssm", m.scale);
      add("ssm", m.shift);
      add("ssm", m.fuse);
    }
  out.push_back({"const", &g.constant.values()});
  return out;
}

template <typename T>
BasicGenerator<T> zeros_like(const BasicGenerator<T>& g) {
  BasicGenerator<T> z = g;
  for (auto r : parameters(z)) std::fill(r.values->begin(), r.values->end(), T(0));
  return z;
}

template <typename T>
std::size_t parameter_count(BasicGenerator<T> g) {
  std::size_t n = 0;
  for (auto r : parameters(g)) n += r.values->size();
  return n;
}

/// Same structure, values converted to U.
template <typename U, typename T>
BasicGenerator<U> cast_generator(const BasicGenerator<T>& g) {
  auto conv = [](const BasicConvParams<T>& p) { return p.template cast<U>(); };
  BasicGenerator<U> out;
  for (const auto& chain : g.neck_down) {
    out.neck_down.emplace_back();
    for (const auto& p : chain) out.neck_down.back().push_back(conv(p));
  }
  out.neck_fuse = conv(g.neck_fuse);
  for (const auto& b : g.bottlenecks) out.bottlenecks.push_back({conv(b.a), conv(b.b)});
  for (const auto& u : g.upsampler) {
    UpBlock<U> block{conv(u.up), {}};
    for (const auto& c : u.convs) block.convs.push_back(conv(c));
    out.upsampler.push_back(std::move(block));
  }
  for (const auto& s : g.styles) out.styles.push_back({conv(s.a), conv(s.b)});
  for (const auto& stage : g.decoder) {
    out.decoder.emplace_back();
    for (const auto& m : stage)
      out.decoder.back().push_back(
          {conv(m.upsample), conv(m.scale), conv(m.shift), conv(m.fuse)});
  }
  out.constant = g.constant.template cast<U>();
  return out;
}

template <typename T>
struct BasicInvadState {
  PipelineConfig config;
  std::size_t height = 0, width = 0;
  std::vector<BasicConvParams<T>> encoder;  // frozen
  BasicGenerator<T> generator;
  BasicGenerator<T> first_moment, second_moment;
  std::uint64_t step = 0;

  /// Network in another precision; optimizer moments are not carried over.
  template <typename U>
  BasicInvadState<U> cast() const {
    BasicInvadState<U> out;
    out.config = config;
    out.height = height;
    out.width = width;
    for (const auto& p : encoder) out.encoder.push_back(p.template cast<U>());
    out.generator = cast_generator<U>(generator);
    out.step = step;
    return out;
  }
};

using InvadState = BasicInvadState<double>;

namespace detail {

inline ConvParams make_conv(std::mt19937_64& rng, std::size_t co,
                            std::size_t ci, std::size_t k, std::size_t stride,
                            double weight_std, double bias = 0.0) {
  ConvParams p;
  p.weight = Tensor4(co, ci, k, k);
  std::normal_distribution<double> normal(0.0, weight_std);
  for (auto& v : p.weight.values()) v = normal(rng);
  p.bias.assign(co, bias);
  p.stride = stride;
  p.pad = k / 2;
  return p;
}

inline double he_std(std::size_t fan_in, Activation act) {
  const double gain = act == Activation::kIdentity ? 1.0 : 2.0;
  return std::sqrt(gain / static_cast<double>(fan_in));
}

}  // namespace detail

/// Seeded initialization for inputs of size height x width.
inline InvadState init_state(const PipelineConfig& config, std::uint64_t seed,
                             std::size_t height = 32, std::size_t width = 32) {
  config.validate();
  const std::size_t m = config.size_multiple();
  if (height == 0 || width == 0 || height % m || width % m)
    throw Error(ErrorCode::kShapeMismatch,
                "input " + std::to_string(height) + "x" + std::to_string(width) +
                    " is not a multiple of " + std::to_string(m));
  std::mt19937_64 rng(seed);
  const std::size_t S = config.stages;
  const std::size_t k1 = config.kernel;
  Activation act = config.activation;
  auto mk = [&](std::size_t co, std::size_t ci, std::size_t k,
                std::size_t stride, double scale = 1.0, double bias = 0.0) {
    return detail::make_conv(rng, co, ci, k, stride,
                             scale * detail::he_std(ci * k * k, act), bias);
  };

  InvadState st;
  st.config = config;
  st.height = height;
  st.width = width;
  std::size_t prev = config.in_channels;
  for (std::size_t s = 0; s < S; ++s) {
    st.encoder.push_back(detail::make_conv(
        rng, config.encoder_channels(s), prev, 3, 2,
        detail::he_std(prev * 9, Activation::kRelu)));
    prev = config.encoder_channels(s);
  }

  Generator& g = st.generator;
  std::size_t concat = 0;
  g.neck_down.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t c = config.encoder_channels(s);
    for (std::size_t k = s + 1; k < S; ++k) g.neck_down[s].push_back(mk(c, c, 3, 2));
    concat += c;
  }
  g.neck_fuse = mk(config.n_r, concat, 3, 2);
  for (std::size_t b = 0; b < config.n_b; ++b)
    g.bottlenecks.push_back(
        {mk(config.n_r, config.n_r, k1, 1), mk(config.n_r, config.n_r, k1, 1, 0.5)});
  for (std::size_t j = 0; j < S; ++j) {
    UpBlock<double> u;
    u.up = mk(config.n_r, config.n_r, 3, 2, 2.0);
    for (std::size_t c = 0; c < config.n_c; ++c)
      u.convs.push_back(mk(config.n_r, config.n_r, k1, 1));
    g.upsampler.push_back(std::move(u));
  }
  if (config.use_style)
    for (std::size_t s = 0; s < S; ++s)
      g.styles.push_back({mk(config.n_s, config.n_r, k1, 1),
                          mk(config.n_s, config.n_s, k1, 1)});
  const std::size_t sc = config.style_channels();
  g.decoder.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t c = config.encoder_channels(s);
    for (std::size_t l = 0; l < config.n_l; ++l) {
      SsmModule<double> mod;
      if (l == 0 && s + 1 < S)
        mod.upsample = mk(c, config.encoder_channels(s + 1), 3, 2, 2.0);
      if (config.use_ssm) {
        mod.scale = mk(c, sc, k1, 1, 0.1, 1.0);
        mod.shift = mk(c, sc, k1, 1, 0.5);
      } else {
        mod.fuse = mk(c, c + sc, k1, 1);
      }
      g.decoder[s].push_back(std::move(mod));
    }
  }
  const std::size_t deep = S - 1;
  g.constant = Tensor4(1, config.encoder_channels(deep), height >> (deep + 1),
                       width >> (deep + 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : g.constant.values()) v = normal(rng);

  st.first_moment = zeros_like(g);
  st.second_moment = zeros_like(g);
  return st;
}

template <typename T>
struct ConvTrace {
  BasicTensor4<T> input, pre;
};

template <typename T>
struct FuseTrace {
  BasicTensor4<T> input, cat;
};

/// Everything the backward pass needs from one forward pass of one sample.
template <typename T>
struct BasicForwardTrace {
  using Tensor = BasicTensor4<T>;
  std::vector<Tensor> encoder;  // F^I per stage
  std::vector<Tensor> decoder;  // F^O per stage
  std::vector<std::vector<ConvTrace<T>>> neck_down;
  ConvTrace<T> neck_fuse;
  std::vector<std::pair<ConvTrace<T>, ConvTrace<T>>> bottlenecks;
  Tensor fused;
  std::vector<std::vector<ConvTrace<T>>> upsampler;  // per block: up, convs...
  std::vector<Tensor> rescaled;                      // per stage
  std::vector<std::pair<ConvTrace<T>, ConvTrace<T>>> styles;
  std::vector<Tensor> style;                         // per stage
  std::vector<std::vector<BasicSsmTrace<T>>> ssm;
  std::vector<std::vector<FuseTrace<T>>> fuse;
};

using ForwardTrace = BasicForwardTrace<double>;

namespace detail {

template <typename T>
BasicTensor4<T> run_conv(const BasicTensor4<T>& x, const BasicConvParams<T>& p,
                         Activation act, ConvTrace<T>& t, bool transposed = false) {
  t.input = x;
  t.pre = transposed ? deconv_k3s2(x, p) : conv2d(x, p);
  return invad::apply(act, t.pre);
}

template <typename T>
BasicTensor4<T> run_conv_backward(const ConvTrace<T>& t, const BasicConvParams<T>& p,
                                  Activation act, const BasicTensor4<T>& dy,
                                  BasicConvParams<T>& g, bool transposed = false,
                                  bool need_input_grad = true) {
  BasicTensor4<T> dpre = apply_backward(act, t.pre, dy);
  return transposed
             ? deconv_k3s2_backward(t.input, p, dpre, g, need_input_grad)
             : conv2d_backward(t.input, p, dpre, g, need_input_grad);
}

}  // namespace detail

/// Frozen encoder features of a batch, one tensor per stage.
template <typename T>
std::vector<BasicTensor4<T>> encode(const BasicInvadState<T>& st, const BasicTensor4<T>& image) {
  if (image.c() != st.config.in_channels || image.h() != st.height ||
      image.w() != st.width)
    throw Error(ErrorCode::kShapeMismatch,
                "image " + image.shape_string() + " does not match the state");
  std::vector<BasicTensor4<T>> feats;
  BasicTensor4<T> x = image;
  for (const auto& p : st.encoder) {
    x = apply(Activation::kRelu, conv2d(x, p));
    feats.push_back(x);
  }
  return feats;
}

/// Forward pass of one sample (N = 1), recording the trace.
template <typename T>
BasicForwardTrace<T> forward_sample(const BasicInvadState<T>& st, const BasicTensor4<T>& image) {
  if (image.n() != 1)
    throw Error(ErrorCode::kShapeMismatch, "forward_sample expects N = 1");
  const PipelineConfig& cfg = st.config;
  const BasicGenerator<T>& g = st.generator;
  const Activation act = cfg.activation;
  const std::size_t S = cfg.stages;
  BasicForwardTrace<T> t;
  t.encoder = encode(st, image);

  t.neck_down.resize(S);
  std::vector<BasicTensor4<T>> down(S);
  for (std::size_t s = 0; s < S; ++s) {
    BasicTensor4<T> x = t.encoder[s];
    t.neck_down[s].resize(g.neck_down[s].size());
    for (std::size_t k = 0; k < g.neck_down[s].size(); ++k)
      x = detail::run_conv(x, g.neck_down[s][k], act, t.neck_down[s][k]);
    down[s] = std::move(x);
  }
  std::vector<const BasicTensor4<T>*> parts;
  for (const auto& d : down) parts.push_back(&d);
  BasicTensor4<T> x = detail::run_conv(concat_channels(parts), g.neck_fuse, act, t.neck_fuse);
  t.bottlenecks.resize(g.bottlenecks.size());
  for (std::size_t b = 0; b < g.bottlenecks.size(); ++b) {
    auto& [ta, tb] = t.bottlenecks[b];
    BasicTensor4<T> mid = detail::run_conv(x, g.bottlenecks[b].a, act, ta);
    tb.input = std::move(mid);
    tb.pre = conv2d(tb.input, g.bottlenecks[b].b);
    x += tb.pre;
  }
  t.fused = x;

  t.rescaled.resize(S);
  t.upsampler.resize(S);
  for (std::size_t j = 0; j < S; ++j) {
    const UpBlock<T>& u = g.upsampler[j];
    auto& tr = t.upsampler[j];
    tr.resize(1 + u.convs.size());
    x = detail::run_conv(x, u.up, act, tr[0], true);
    for (std::size_t c = 0; c < u.convs.size(); ++c)
      x = detail::run_conv(x, u.convs[c], act, tr[1 + c]);
    t.rescaled[S - 1 - j] = x;
  }

  t.style.resize(S);
  t.styles.resize(cfg.use_style ? S : 0);
  for (std::size_t s = 0; s < S; ++s) {
    if (!cfg.use_style) {
      t.style[s] = t.rescaled[s];
      continue;
    }
    auto& [ta, tb] = t.styles[s];
    BasicTensor4<T> mid = detail::run_conv(t.rescaled[s], g.styles[s].a, act, ta);
    t.style[s] = detail::run_conv(mid, g.styles[s].b, Activation::kIdentity, tb);
  }

  t.decoder.resize(S);
  t.ssm.assign(S, {});
  t.fuse.assign(S, {});
  BasicTensor4<T> h = g.constant;
  for (std::size_t si = S; si-- > 0;) {
    const auto& mods = g.decoder[si];
    if (cfg.use_ssm) t.ssm[si].resize(mods.size());
    else t.fuse[si].resize(mods.size());
    for (std::size_t l = 0; l < mods.size(); ++l) {
      const SsmModule<T>& m = mods[l];
      const BasicConvParams<T>* up = m.upsample.empty() ? nullptr : &m.upsample;
      if (cfg.use_ssm) {
        h = ssm_apply(h, t.style[si], m.scale, m.shift, cfg.epsilon, up,
                      &t.ssm[si][l]);
      } else {
        FuseTrace<T>& ft = t.fuse[si][l];
        ft.input = h;
        BasicTensor4<T> hu = up ? deconv_k3s2(h, *up) : h;
        ft.cat = concat_channels<T>({&hu, &t.style[si]});
        h = conv2d(ft.cat, m.fuse);
      }
    }
    t.decoder[si] = h;
  }
  return t;
}

/// Accumulates the parameter gradients of one sample into grad, given
/// dL/dF^O per stage.
template <typename T>
void backward_sample(const BasicInvadState<T>& st, const BasicForwardTrace<T>& t,
                     const std::vector<BasicTensor4<T>>& d_out, BasicGenerator<T>& grad) {
  const PipelineConfig& cfg = st.config;
  const BasicGenerator<T>& g = st.generator;
  const Activation act = cfg.activation;
  const std::size_t S = cfg.stages;

  std::vector<BasicTensor4<T>> d_style(S);
  BasicTensor4<T> carry;  // gradient flowing into the next-deeper stage's output
  for (std::size_t si = 0; si < S; ++si) {
    BasicTensor4<T> dh = d_out[si];
    if (!carry.empty()) dh += carry;
    const auto& mods = g.decoder[si];
    d_style[si] = BasicTensor4<T>(t.style[si].n(), t.style[si].c(), t.style[si].h(),
                          t.style[si].w());
    for (std::size_t l = mods.size(); l-- > 0;) {
      const SsmModule<T>& m = mods[l];
      SsmModule<T>& gm = grad.decoder[si][l];
      const BasicConvParams<T>* up = m.upsample.empty() ? nullptr : &m.upsample;
      if (cfg.use_ssm) {
        BasicSsmGrads<T> sg = ssm_backward(t.ssm[si][l], m.scale, m.shift, up, dh,
                                   gm.scale, gm.shift, &gm.upsample);
        d_style[si] += sg.style;
        dh = std::move(sg.input);
      } else {
        const FuseTrace<T>& ft = t.fuse[si][l];
        BasicTensor4<T> dcat = conv2d_backward(ft.cat, m.fuse, dh, gm.fuse);
        const std::size_t hc = ft.cat.c() - t.style[si].c();
        auto parts = split_channels(dcat, {hc, t.style[si].c()});
        d_style[si] += parts[1];
        dh = up ? deconv_k3s2_backward(ft.input, *up, parts[0], gm.upsample)
                : std::move(parts[0]);
      }
    }
    carry = std::move(dh);
  }
  grad.constant += carry;

  std::vector<BasicTensor4<T>> d_rescaled(S);
  for (std::size_t s = 0; s < S; ++s) {
    if (!cfg.use_style) {
      d_rescaled[s] = std::move(d_style[s]);
      continue;
    }
    const auto& [ta, tb] = t.styles[s];
    BasicTensor4<T> dmid = detail::run_conv_backward(tb, g.styles[s].b, Activation::kIdentity,
                                             d_style[s], grad.styles[s].b);
    d_rescaled[s] =
        detail::run_conv_backward(ta, g.styles[s].a, act, dmid, grad.styles[s].a);
  }

  BasicTensor4<T> dx;
  for (std::size_t j = S; j-- > 0;) {
    const UpBlock<T>& u = g.upsampler[j];
    UpBlock<T>& gu = grad.upsampler[j];
    const auto& tr = t.upsampler[j];
    BasicTensor4<T> dy = std::move(d_rescaled[S - 1 - j]);
    if (!dx.empty()) dy += dx;
    for (std::size_t c = u.convs.size(); c-- > 0;)
      dy = detail::run_conv_backward(tr[1 + c], u.convs[c], act, dy, gu.convs[c]);
    dx = detail::run_conv_backward(tr[0], u.up, act, dy, gu.up, true);
  }

  for (std::size_t b = g.bottlenecks.size(); b-- > 0;) {
    const auto& [ta, tb] = t.bottlenecks[b];
    BasicTensor4<T> dmid = conv2d_backward(tb.input, g.bottlenecks[b].b, dx,
                                   grad.bottlenecks[b].b);
    dx += detail::run_conv_backward(ta, g.bottlenecks[b].a, act, dmid,
                                    grad.bottlenecks[b].a);
  }
  BasicTensor4<T> dcat = detail::run_conv_backward(t.neck_fuse, g.neck_fuse, act, dx,
                                           grad.neck_fuse);
  std::vector<std::size_t> sizes;
  for (std::size_t s = 0; s < S; ++s) sizes.push_back(cfg.encoder_channels(s));
  auto d_down = split_channels(dcat, sizes);
  for (std::size_t s = 0; s < S; ++s) {
    BasicTensor4<T> d = std::move(d_down[s]);
    for (std::size_t k = g.neck_down[s].size(); k-- > 0;)
      d = detail::run_conv_backward(t.neck_down[s][k], g.neck_down[s][k], act, d,
                                    grad.neck_down[s][k], false, k > 0);
  }
}

/// Mean over stages of the per-element mean squared difference.
template <typename T>
T loss_mse(const std::vector<BasicTensor4<T>>& f_i, const std::vector<BasicTensor4<T>>& f_o) {
  if (f_i.size() != f_o.size() || f_i.empty())
    throw Error(ErrorCode::kShapeMismatch, "stage counts differ");
  T total = 0;
  for (std::size_t s = 0; s < f_i.size(); ++s) {
    f_i[s].require_same(f_o[s], "loss");
    T sum = 0;
    for (std::size_t i = 0; i < f_i[s].size(); ++i) {
      const T d = f_o[s][i] - f_i[s][i];
      sum += d * d;
    }
    total += sum / static_cast<T>(f_i[s].size());
  }
  return total / static_cast<T>(f_i.size());
}

/// dL/dF^O for loss_mse, scaled by `weight` (1/batch size for batch means).
template <typename T>
std::vector<BasicTensor4<T>> loss_mse_gradient(const std::vector<BasicTensor4<T>>& f_i,
                                               const std::vector<BasicTensor4<T>>& f_o,
                                               T weight = T(1)) {
  std::vector<BasicTensor4<T>> d;
  for (std::size_t s = 0; s < f_i.size(); ++s) {
    BasicTensor4<T> g = f_o[s];
    const T k = T(2) * weight / (static_cast<T>(f_i.size()) * static_cast<T>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = k * (f_o[s][i] - f_i[s][i]);
    d.push_back(std::move(g));
  }
  return d;
}

namespace detail {

template <typename T>
BasicTensor4<T> take_sample(const BasicTensor4<T>& batch, std::size_t n) {
  BasicTensor4<T> one(1, batch.c(), batch.h(), batch.w());
  std::copy_n(batch.sample(n), one.size(), one.data());
  return one;
}

template <typename T>
void stack_into(std::vector<BasicTensor4<T>>& acc, std::vector<BasicTensor4<T>>&& one,
                       std::size_t n, std::size_t batch) {
  if (acc.empty())
    for (const auto& t : one) acc.emplace_back(batch, t.c(), t.h(), t.w());
  for (std::size_t s = 0; s < one.size(); ++s)
    std::copy_n(one[s].data(), one[s].size(), acc[s].sample(n));
}

}  // namespace detail

template <typename T>
struct BasicPipelineOutput {
  std::vector<BasicTensor4<T>> encoder;  // F^I
  std::vector<BasicTensor4<T>> decoder;  // F^O
};

using PipelineOutput = BasicPipelineOutput<double>;

template <typename T>
BasicPipelineOutput<T> pipeline_forward(const BasicTensor4<T>& images, const BasicInvadState<T>& st) {
  BasicPipelineOutput<T> out;
  for (std::size_t n = 0; n < images.n(); ++n) {
    BasicForwardTrace<T> t = forward_sample(st, detail::take_sample(images, n));
    detail::stack_into(out.encoder, std::move(t.encoder), n, images.n());
    detail::stack_into(out.decoder, std::move(t.decoder), n, images.n());
  }
  return out;
}

}  // namespace adbench::invad
