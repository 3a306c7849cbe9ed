// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptr/mlm/layers.hpp"

#include <cmath>
#include <numbers>

#include "ptr/error.hpp"
#include "ptr/kernels.hpp"

namespace ptr::mlm::layers {

namespace {

constexpr double kGeluC = 0.044715;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

void require(bool ok, const char* what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  double hi = logits[0];
  for (double z : logits) hi = std::max(hi, z);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

void linear_forward(const Matrix& x, const Matrix& w, const Matrix& b, Matrix& y) {
  require(x.cols() == w.cols() && b.cols() == w.rows(), "linear: shape mismatch");
  const auto& k = kernels::active();
  y = Matrix(x.rows(), w.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    k.affine(w.data(), b.data(), x.row(r).data(), y.row(r).data(), w.rows(), w.cols());
  }
}

void linear_backward(const Matrix& x, const Matrix& w, const Matrix& dy, Matrix& dx, Matrix& dw,
                     Matrix& db) {
  require(dy.cols() == w.rows() && x.rows() == dy.rows(), "linear backward: shape mismatch");
  const auto& k = kernels::active();
  dx = Matrix(x.rows(), w.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* g = dy.row(r).data();
    for (std::size_t o = 0; o < w.rows(); ++o) {
      if (g[o] == 0.0) continue;
      k.axpy(g[o], x.row(r).data(), dw.row(o).data(), w.cols());
      k.axpy(g[o], w.row(o).data(), dx.row(r).data(), w.cols());
      db(0, o) += g[o];
    }
  }
}

void layer_norm_forward(const Matrix& x, const Matrix& gain, const Matrix& bias, double eps,
                        Matrix& y, LayerNormCache& cache) {
  const std::size_t n = x.rows(), d = x.cols();
  require(gain.cols() == d && bias.cols() == d, "layer norm: shape mismatch");
  y = Matrix(n, d);
  cache.xhat = Matrix(n, d);
  cache.rstd.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double rstd = 1.0 / std::sqrt(var + eps);
    cache.rstd[r] = rstd;
    for (std::size_t c = 0; c < d; ++c) {
      const double xh = (row[c] - mean) * rstd;
      cache.xhat(r, c) = xh;
      y(r, c) = xh * gain(0, c) + bias(0, c);
    }
  }
}

void layer_norm_backward(const Matrix& dy, const Matrix& gain, const LayerNormCache& cache,
                         Matrix& dx, Matrix& dgain, Matrix& dbias) {
  const std::size_t n = dy.rows(), d = dy.cols();
  dx = Matrix(n, d);
  std::vector<double> dxhat(d);
  for (std::size_t r = 0; r < n; ++r) {
    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      dgain(0, c) += dy(r, c) * cache.xhat(r, c);
      dbias(0, c) += dy(r, c);
      dxhat[c] = dy(r, c) * gain(0, c);
      mean_dxhat += dxhat[c];
      mean_dxhat_xhat += dxhat[c] * cache.xhat(r, c);
    }
    mean_dxhat /= static_cast<double>(d);
    mean_dxhat_xhat /= static_cast<double>(d);
    for (std::size_t c = 0; c < d; ++c) {
      dx(r, c) = cache.rstd[r] * (dxhat[c] - mean_dxhat - cache.xhat(r, c) * mean_dxhat_xhat);
    }
  }
}

void gelu_forward(const Matrix& x, Matrix& y) {
  y = Matrix(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    y.data()[i] = 0.5 * v * (1.0 + std::tanh(kSqrt2OverPi * (v + kGeluC * v * v * v)));
  }
}

void gelu_backward(const Matrix& x, const Matrix& dy, Matrix& dx) {
  dx = Matrix(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    const double t = std::tanh(kSqrt2OverPi * (v + kGeluC * v * v * v));
    const double dt = (1.0 - t * t) * kSqrt2OverPi * (1.0 + 3.0 * kGeluC * v * v);
    dx.data()[i] = dy.data()[i] * (0.5 * (1.0 + t) + 0.5 * v * dt);
  }
}

void attention_forward(const Matrix& q, const Matrix& k, const Matrix& v, int n_heads,
                       Matrix& context, std::vector<Matrix>& probs) {
  const std::size_t n = q.rows(), d = q.cols();
  const std::size_t h = static_cast<std::size_t>(n_heads);
  require(h > 0 && d % h == 0 && k.same_shape(q) && v.same_shape(q), "attention: shape mismatch");
  const std::size_t dh = d / h;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto& kern = kernels::active();
  context = Matrix(n, d);
  probs.assign(h, Matrix(n, n));
  std::vector<double> scores(n);
  for (std::size_t head = 0; head < h; ++head) {
    const std::size_t off = head * dh;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        scores[j] = scale * kern.dot(q.row(i).data() + off, k.row(j).data() + off, dh);
      }
      const auto p = softmax(scores);
      std::copy(p.begin(), p.end(), probs[head].row(i).begin());
      for (std::size_t j = 0; j < n; ++j) {
        kern.axpy(p[j], v.row(j).data() + off, context.row(i).data() + off, dh);
      }
    }
  }
}

void attention_backward(const Matrix& q, const Matrix& k, const Matrix& v, int n_heads,
                        const std::vector<Matrix>& probs, const Matrix& dcontext, Matrix& dq,
                        Matrix& dk, Matrix& dv) {
  const std::size_t n = q.rows(), d = q.cols();
  const std::size_t h = static_cast<std::size_t>(n_heads);
  const std::size_t dh = d / h;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto& kern = kernels::active();
  dq = Matrix(n, d);
  dk = Matrix(n, d);
  dv = Matrix(n, d);
  std::vector<double> dp(n);
  for (std::size_t head = 0; head < h; ++head) {
    const std::size_t off = head * dh;
    const Matrix& p = probs[head];
    for (std::size_t i = 0; i < n; ++i) {
      const double* dc = dcontext.row(i).data() + off;
      double weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        dp[j] = kern.dot(dc, v.row(j).data() + off, dh);
        weighted += p(i, j) * dp[j];
        kern.axpy(p(i, j), dc, dv.row(j).data() + off, dh);
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double ds = p(i, j) * (dp[j] - weighted) * scale;
        if (ds == 0.0) continue;
        kern.axpy(ds, k.row(j).data() + off, dq.row(i).data() + off, dh);
        kern.axpy(ds, q.row(i).data() + off, dk.row(j).data() + off, dh);
      }
    }
  }
}

}  // namespace ptr::mlm::layers
