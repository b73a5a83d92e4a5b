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

// Dense NCHW tensors and the differentiable building blocks of the
// feature-inversion network. Every forward op has a matching *_backward that
// returns the input gradient and accumulates parameter gradients.
//
// Kernels are templated on the scalar type; the network runs in double, and
// the gradient checker re-evaluates losses in long double.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "adbench/error.hpp"

namespace adbench::invad {

template <typename T>
class BasicTensor4 {
 public:
  using value_type = T;

  BasicTensor4() = default;
  BasicTensor4(std::size_t n, std::size_t c, std::size_t h, std::size_t w,
               T fill = T(0))
      : n_(n), c_(c), h_(h), w_(w), data_(n * c * h * w, fill) {}

  std::size_t n() const { return n_; }
  std::size_t c() const { return c_; }
  std::size_t h() const { return h_; }
  std::size_t w() const { return w_; }
  std::size_t size() const { return data_.size(); }
  std::size_t plane() const { return h_ * w_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t n, std::size_t c, std::size_t y, std::size_t x) {
    return data_[((n * c_ + c) * h_ + y) * w_ + x];
  }
  T operator()(std::size_t n, std::size_t c, std::size_t y,
               std::size_t x) const {
    return data_[((n * c_ + c) * h_ + y) * w_ + x];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  T operator[](std::size_t i) const { return data_[i]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  T* sample(std::size_t n) { return data_.data() + n * c_ * h_ * w_; }
  const T* sample(std::size_t n) const { return data_.data() + n * c_ * h_ * w_; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool same_shape(const BasicTensor4& o) const {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }
  std::string shape_string() const {
    return "(" + std::to_string(n_) + "," + std::to_string(c_) + "," +
           std::to_string(h_) + "," + std::to_string(w_) + ")";
  }

  BasicTensor4& operator+=(const BasicTensor4& o) {
    require_same(o, "add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  void require_same(const BasicTensor4& o, const char* what) const {
    if (!same_shape(o))
      throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": " +
                                                 shape_string() + " vs " +
                                                 o.shape_string());
  }

  template <typename U>
  BasicTensor4<U> cast() const {
    BasicTensor4<U> out(n_, c_, h_, w_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

  friend bool operator==(const BasicTensor4&, const BasicTensor4&) = default;

 private:
  std::size_t n_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<T> data_;
};

using Tensor4 = BasicTensor4<double>;

template <typename T>
T dot(const BasicTensor4<T>& a, const BasicTensor4<T>& b) {
  a.require_same(b, "dot");
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Convolution weights (C_out, C_in, k, k) with bias (C_out). Transposed
/// convolutions use the same layout: out channel first.
template <typename T>
struct BasicConvParams {
  BasicTensor4<T> weight;
  std::vector<T> bias;
  std::size_t stride = 1;
  std::size_t pad = 1;

  std::size_t out_channels() const { return weight.n(); }
  std::size_t in_channels() const { return weight.c(); }
  std::size_t kernel() const { return weight.h(); }
  bool empty() const { return weight.empty(); }

  template <typename U>
  BasicConvParams<U> cast() const {
    return {weight.template cast<U>(), std::vector<U>(bias.begin(), bias.end()),
            stride, pad};
  }
};

using ConvParams = BasicConvParams<double>;

inline std::size_t conv_out_extent(std::size_t in, std::size_t k,
                                   std::size_t s, std::size_t p) {
  if (in + 2 * p < k)
    throw Error(ErrorCode::kShapeMismatch, "kernel larger than padded input");
  return (in + 2 * p - k) / s + 1;
}

namespace detail {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMatrix<T>>;

// Unfolds one (C, H, W) sample into (C*k*k, Ho*Wo) patch columns.
template <typename T>
void im2col(const T* src, std::size_t c, std::size_t h, std::size_t w,
            std::size_t k, std::size_t s, std::size_t p, std::size_t ho,
            std::size_t wo, T* cols) {
  const std::size_t cols_w = ho * wo;
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t ky = 0; ky < k; ++ky)
      for (std::size_t kx = 0; kx < k; ++kx) {
        T* row = cols + ((ch * k + ky) * k + kx) * cols_w;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const long iy = static_cast<long>(oy * s + ky) - static_cast<long>(p);
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const long ix = static_cast<long>(ox * s + kx) - static_cast<long>(p);
            row[oy * wo + ox] = (iy >= 0 && iy < static_cast<long>(h) && ix >= 0 &&
                                 ix < static_cast<long>(w))
                                    ? src[(ch * h + iy) * w + ix]
                                    : T(0);
          }
        }
      }
}

// Adjoint of im2col: scatters patch columns back, accumulating into dst.
template <typename T>
void col2im(const T* cols, std::size_t c, std::size_t h, std::size_t w,
            std::size_t k, std::size_t s, std::size_t p, std::size_t ho,
            std::size_t wo, T* dst) {
  const std::size_t cols_w = ho * wo;
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t ky = 0; ky < k; ++ky)
      for (std::size_t kx = 0; kx < k; ++kx) {
        const T* row = cols + ((ch * k + ky) * k + kx) * cols_w;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const long iy = static_cast<long>(oy * s + ky) - static_cast<long>(p);
          if (iy < 0 || iy >= static_cast<long>(h)) continue;
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const long ix = static_cast<long>(ox * s + kx) - static_cast<long>(p);
            if (ix < 0 || ix >= static_cast<long>(w)) continue;
            dst[(ch * h + iy) * w + ix] += row[oy * wo + ox];
          }
        }
      }
}

// (C_out, C_in*9) -> (C_in, C_out*9).
template <typename T>
RowMatrix<T> transposed_kernel(const BasicConvParams<T>& p) {
  const std::size_t co = p.out_channels(), ci = p.in_channels();
  const std::size_t kk = p.kernel() * p.kernel();
  RowMatrix<T> t(ci, co * kk);
  for (std::size_t o = 0; o < co; ++o)
    for (std::size_t i = 0; i < ci; ++i)
      for (std::size_t k = 0; k < kk; ++k) t(i, o * kk + k) = p.weight[(o * ci + i) * kk + k];
  return t;
}

template <typename T>
void check_conv(const BasicTensor4<T>& x, const BasicConvParams<T>& p) {
  if (p.weight.h() != p.weight.w() || p.bias.size() != p.out_channels())
    throw Error(ErrorCode::kShapeMismatch, "malformed conv parameters");
  if (x.c() != p.in_channels())
    throw Error(ErrorCode::kShapeMismatch,
                "input has " + std::to_string(x.c()) + " channels, kernel " +
                    std::to_string(p.in_channels()));
  if (p.stride == 0) throw Error(ErrorCode::kInvalidArgument, "stride must be positive");
}

template <typename T>
void check_deconv(const BasicTensor4<T>& x, const BasicConvParams<T>& p) {
  check_conv(x, p);
  if (p.kernel() != 3 || p.stride != 2 || p.pad != 1)
    throw Error(ErrorCode::kInvalidArgument,
                "transposed convolution expects kernel 3, stride 2, pad 1");
}

}  // namespace detail

/// Direct cross-correlation with zero padding.
template <typename T>
BasicTensor4<T> conv2d(const BasicTensor4<T>& x, const BasicConvParams<T>& p) {
  detail::check_conv(x, p);
  const std::size_t k = p.kernel(), co = p.out_channels(), ci = x.c();
  const std::size_t ho = conv_out_extent(x.h(), k, p.stride, p.pad);
  const std::size_t wo = conv_out_extent(x.w(), k, p.stride, p.pad);
  BasicTensor4<T> out(x.n(), co, ho, wo);
  detail::RowMatrix<T> cols(ci * k * k, ho * wo);
  detail::ConstMatMap<T> wmat(p.weight.data(), co, ci * k * k);
  for (std::size_t n = 0; n < x.n(); ++n) {
    detail::im2col(x.sample(n), ci, x.h(), x.w(), k, p.stride, p.pad, ho, wo, cols.data());
    detail::MatMap<T> y(out.sample(n), co, ho * wo);
    y.noalias() = wmat * cols;
    for (std::size_t o = 0; o < co; ++o) y.row(o).array() += p.bias[o];
  }
  return out;
}

/// Returns dL/dx (skipped when need_input_grad is false) and accumulates
/// dL/dW, dL/db into grad.
template <typename T>
BasicTensor4<T> conv2d_backward(const BasicTensor4<T>& x, const BasicConvParams<T>& p,
                                const BasicTensor4<T>& dy, BasicConvParams<T>& grad,
                                bool need_input_grad = true) {
  const std::size_t k = p.kernel(), co = p.out_channels(), ci = x.c();
  const std::size_t ho = dy.h(), wo = dy.w();
  BasicTensor4<T> dx;
  if (need_input_grad) dx = BasicTensor4<T>(x.n(), ci, x.h(), x.w());
  detail::RowMatrix<T> cols(ci * k * k, ho * wo);
  detail::RowMatrix<T> dcols;
  detail::ConstMatMap<T> wmat(p.weight.data(), co, ci * k * k);
  detail::MatMap<T> gw(grad.weight.data(), co, ci * k * k);
  for (std::size_t n = 0; n < x.n(); ++n) {
    detail::ConstMatMap<T> g(dy.sample(n), co, ho * wo);
    detail::im2col(x.sample(n), ci, x.h(), x.w(), k, p.stride, p.pad, ho, wo, cols.data());
    gw.noalias() += g * cols.transpose();
    for (std::size_t o = 0; o < co; ++o) grad.bias[o] += g.row(o).sum();
    if (need_input_grad) {
      dcols.noalias() = wmat.transpose() * g;
      detail::col2im(dcols.data(), ci, x.h(), x.w(), k, p.stride, p.pad, ho, wo, dx.sample(n));
    }
  }
  return dx;
}

/// Transposed 3x3 stride-2 convolution with output padding 1: (H, W) ->
/// (2H, 2W); out[o, 2y-1+ky, 2x-1+kx] += x[i, y, x] * W[o, i, ky, kx].
template <typename T>
BasicTensor4<T> deconv_k3s2(const BasicTensor4<T>& x, const BasicConvParams<T>& p) {
  detail::check_deconv(x, p);
  const std::size_t co = p.out_channels(), ci = x.c();
  const std::size_t ho = 2 * x.h(), wo = 2 * x.w();
  BasicTensor4<T> out(x.n(), co, ho, wo);
  const detail::RowMatrix<T> wt = detail::transposed_kernel(p);
  detail::RowMatrix<T> cols(co * 9, x.plane());
  for (std::size_t n = 0; n < x.n(); ++n) {
    detail::ConstMatMap<T> in(x.sample(n), ci, x.plane());
    cols.noalias() = wt.transpose() * in;
    detail::col2im(cols.data(), co, ho, wo, 3, 2, 1, x.h(), x.w(), out.sample(n));
    T* o = out.sample(n);
    for (std::size_t c = 0; c < co; ++c)
      for (std::size_t i = 0; i < ho * wo; ++i) o[c * ho * wo + i] += p.bias[c];
  }
  return out;
}

template <typename T>
BasicTensor4<T> deconv_k3s2_backward(const BasicTensor4<T>& x, const BasicConvParams<T>& p,
                                     const BasicTensor4<T>& dy, BasicConvParams<T>& grad,
                                     bool need_input_grad = true) {
  const std::size_t co = p.out_channels(), ci = x.c();
  const std::size_t ho = dy.h(), wo = dy.w();
  BasicTensor4<T> dx;
  if (need_input_grad) dx = BasicTensor4<T>(x.n(), ci, x.h(), x.w());
  const detail::RowMatrix<T> wt = detail::transposed_kernel(p);
  detail::RowMatrix<T> cols(co * 9, x.plane());
  detail::RowMatrix<T> gwt = detail::RowMatrix<T>::Zero(ci, co * 9);
  for (std::size_t n = 0; n < x.n(); ++n) {
    detail::im2col(dy.sample(n), co, ho, wo, 3, 2, 1, x.h(), x.w(), cols.data());
    detail::ConstMatMap<T> in(x.sample(n), ci, x.plane());
    gwt.noalias() += in * cols.transpose();
    if (need_input_grad) {
      detail::MatMap<T> d(dx.sample(n), ci, x.plane());
      d.noalias() = wt * cols;
    }
    const T* g = dy.sample(n);
    for (std::size_t c = 0; c < co; ++c)
      for (std::size_t i = 0; i < ho * wo; ++i) grad.bias[c] += g[c * ho * wo + i];
  }
  for (std::size_t o = 0; o < co; ++o)
    for (std::size_t i = 0; i < ci; ++i)
      for (std::size_t k = 0; k < 9; ++k) grad.weight[(o * ci + i) * 9 + k] += gwt(i, o * 9 + k);
  return dx;
}

enum class Activation { kIdentity, kRelu, kSilu };

template <typename T>
T activate(Activation a, T v) {
  switch (a) {
    case Activation::kRelu: return v > T(0) ? v : T(0);
    case Activation::kSilu: return v / (T(1) + std::exp(-v));
    case Activation::kIdentity: break;
  }
  return v;
}

template <typename T>
T activate_derivative(Activation a, T v) {
  switch (a) {
    case Activation::kRelu: return v > T(0) ? T(1) : T(0);
    case Activation::kSilu: {
      const T s = T(1) / (T(1) + std::exp(-v));
      return s * (T(1) + v * (T(1) - s));
    }
    case Activation::kIdentity: break;
  }
  return T(1);
}

template <typename T>
BasicTensor4<T> apply(Activation a, BasicTensor4<T> x) {
  if (a == Activation::kIdentity) return x;
  for (auto& v : x.values()) v = activate(a, v);
  return x;
}

/// dL/d(pre) given the pre-activation values and dL/d(post).
template <typename T>
BasicTensor4<T> apply_backward(Activation a, const BasicTensor4<T>& pre, BasicTensor4<T> dy) {
  if (a == Activation::kIdentity) return dy;
  for (std::size_t i = 0; i < dy.size(); ++i) dy[i] *= activate_derivative(a, pre[i]);
  return dy;
}

/// Per (n, c) spatial mean and sigma = sqrt(population variance + epsilon).
template <typename T>
struct BasicInstanceStats {
  std::vector<T> mu;
  std::vector<T> sigma;
};

using InstanceStats = BasicInstanceStats<double>;

template <typename T>
BasicInstanceStats<T> instance_stats(const BasicTensor4<T>& x, double epsilon) {
  if (x.plane() == 0) throw Error(ErrorCode::kShapeMismatch, "empty spatial extent");
  BasicInstanceStats<T> st;
  const std::size_t hw = x.plane();
  st.mu.resize(x.n() * x.c());
  st.sigma.resize(x.n() * x.c());
  for (std::size_t nc = 0; nc < x.n() * x.c(); ++nc) {
    const T* v = x.data() + nc * hw;
    T mean = 0;
    for (std::size_t i = 0; i < hw; ++i) mean += v[i];
    mean /= static_cast<T>(hw);
    T var = 0;
    for (std::size_t i = 0; i < hw; ++i) var += (v[i] - mean) * (v[i] - mean);
    var /= static_cast<T>(hw);
    st.mu[nc] = mean;
    st.sigma[nc] = std::sqrt(var + static_cast<T>(epsilon));
  }
  return st;
}

template <typename T>
BasicTensor4<T> standardize(const BasicTensor4<T>& x, const BasicInstanceStats<T>& st) {
  BasicTensor4<T> out = x;
  const std::size_t hw = x.plane();
  for (std::size_t nc = 0; nc < x.n() * x.c(); ++nc)
    for (std::size_t i = 0; i < hw; ++i) out[nc * hw + i] = (x[nc * hw + i] - st.mu[nc]) / st.sigma[nc];
  return out;
}

/// Backward of xhat = (x - mu) / sigma with per-instance statistics.
template <typename T>
BasicTensor4<T> standardize_backward(const BasicTensor4<T>& xhat, const BasicInstanceStats<T>& st,
                                     const BasicTensor4<T>& dxhat) {
  BasicTensor4<T> dx(xhat.n(), xhat.c(), xhat.h(), xhat.w());
  const std::size_t hw = xhat.plane();
  const T m = static_cast<T>(hw);
  for (std::size_t nc = 0; nc < xhat.n() * xhat.c(); ++nc) {
    T sum_g = 0, sum_gx = 0;
    for (std::size_t i = 0; i < hw; ++i) {
      sum_g += dxhat[nc * hw + i];
      sum_gx += dxhat[nc * hw + i] * xhat[nc * hw + i];
    }
    const T inv = T(1) / st.sigma[nc];
    for (std::size_t i = 0; i < hw; ++i)
      dx[nc * hw + i] = inv * (dxhat[nc * hw + i] - sum_g / m - xhat[nc * hw + i] * sum_gx / m);
  }
  return dx;
}

/// Channel concatenation of tensors sharing N, H, W.
template <typename T>
BasicTensor4<T> concat_channels(const std::vector<const BasicTensor4<T>*>& parts) {
  if (parts.empty()) throw Error(ErrorCode::kShapeMismatch, "nothing to concat");
  const BasicTensor4<T>& first = *parts.front();
  std::size_t channels = 0;
  for (const auto* t : parts) {
    if (t->n() != first.n() || t->h() != first.h() || t->w() != first.w())
      throw Error(ErrorCode::kShapeMismatch, "concat spatial mismatch");
    channels += t->c();
  }
  BasicTensor4<T> out(first.n(), channels, first.h(), first.w());
  const std::size_t hw = first.plane();
  for (std::size_t n = 0; n < first.n(); ++n) {
    T* dst = out.sample(n);
    for (const auto* t : parts) {
      std::copy_n(t->sample(n), t->c() * hw, dst);
      dst += t->c() * hw;
    }
  }
  return out;
}

/// Splits a concatenation gradient back into per-part gradients.
template <typename T>
std::vector<BasicTensor4<T>> split_channels(const BasicTensor4<T>& x,
                                            const std::vector<std::size_t>& sizes) {
  std::vector<BasicTensor4<T>> out;
  const std::size_t hw = x.plane();
  std::size_t offset = 0;
  for (std::size_t c : sizes) {
    BasicTensor4<T> part(x.n(), c, x.h(), x.w());
    for (std::size_t n = 0; n < x.n(); ++n)
      std::copy_n(x.sample(n) + offset * hw, c * hw, part.sample(n));
    offset += c;
    out.push_back(std::move(part));
  }
  if (offset != x.c()) throw Error(ErrorCode::kShapeMismatch, "split sizes do not cover channels");
  return out;
}

}  // namespace adbench::invad
