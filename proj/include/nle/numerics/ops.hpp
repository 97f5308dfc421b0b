// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "nle/numerics/rng.hpp"
#include "nle/numerics/tensor.hpp"

namespace nle::ops {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using StridedMap = Eigen::Map<RowMat<T>, 0, Eigen::OuterStride<>>;
template <typename T>
using ConstStridedMap = Eigen::Map<const RowMat<T>, 0, Eigen::OuterStride<>>;

namespace detail {

template <typename T>
std::size_t rows2(const Tensor<T>& t, const char* op) {
  if (t.rank() != 2) throw DimensionError(std::string(op) + ": expected a matrix, got " + shape_str(t.shape()));
  return t.dim(0);
}

template <typename T>
void require_same(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
}

template <typename T>
ConstMatMap<T> view(const Tensor<T>& t) {
  return ConstMatMap<T>(t.raw(), t.rows(), t.cols());
}

template <typename T>
MatMap<T> grad_view(typename Tensor<T>::Node& n) {
  const std::size_t r = n.shape.empty() ? 1 : n.shape[0];
  return MatMap<T>(n.grad_ptr(), r, n.data.size() / r);
}

template <typename T>
ConstMatMap<T> data_view(const typename Tensor<T>::Node& n) {
  const std::size_t r = n.shape.empty() ? 1 : n.shape[0];
  return ConstMatMap<T>(n.data.data(), r, n.data.size() / r);
}

}  // namespace detail

/// a[m×k] · b[k×n]
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  const std::size_t m = detail::rows2(a, "matmul"), k = a.dim(1);
  if (b.rank() != 2 || b.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions disagree, " + shape_str(a.shape()) + " · " +
                         shape_str(b.shape()));
  }
  const std::size_t n = b.dim(1);
  Buffer<T> out(m * n);
  MatMap<T>(out.data(), m, n).noalias() = detail::view(a) * detail::view(b);
  return Tensor<T>::from_op({m, n}, std::move(out), {a, b}, [](typename Tensor<T>::Node& o) {
    auto& A = *o.inputs[0];
    auto& B = *o.inputs[1];
    ConstMatMap<T> G(o.grad.data(), o.shape[0], o.shape[1]);
    if (A.requires_grad) detail::grad_view<T>(A).noalias() += G * detail::data_view<T>(B).transpose();
    if (B.requires_grad) detail::grad_view<T>(B).noalias() += detail::data_view<T>(A).transpose() * G;
  });
}

/// a[m×k] · b[n×k]ᵀ
template <typename T>
Tensor<T> matmul_nt(const Tensor<T>& a, const Tensor<T>& b) {
  const std::size_t m = detail::rows2(a, "matmul_nt"), k = a.dim(1);
  if (b.rank() != 2 || b.dim(1) != k) {
    throw DimensionError("matmul_nt: inner dimensions disagree, " + shape_str(a.shape()) + " · " +
                         shape_str(b.shape()) + "ᵀ");
  }
  const std::size_t n = b.dim(0);
  Buffer<T> out(m * n);
  MatMap<T>(out.data(), m, n).noalias() = detail::view(a) * detail::view(b).transpose();
  return Tensor<T>::from_op({m, n}, std::move(out), {a, b}, [](typename Tensor<T>::Node& o) {
    auto& A = *o.inputs[0];
    auto& B = *o.inputs[1];
    ConstMatMap<T> G(o.grad.data(), o.shape[0], o.shape[1]);
    if (A.requires_grad) detail::grad_view<T>(A).noalias() += G * detail::data_view<T>(B);
    if (B.requires_grad) detail::grad_view<T>(B).noalias() += G.transpose() * detail::data_view<T>(A);
  });
}

/// x[m×k] · w[k×n] + b[n]
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  const std::size_t m = detail::rows2(x, "linear"), k = x.dim(1);
  if (w.rank() != 2 || w.dim(0) != k || b.numel() != w.dim(1)) {
    throw DimensionError("linear: " + shape_str(x.shape()) + " · " + shape_str(w.shape()) + " + " +
                         shape_str(b.shape()));
  }
  const std::size_t n = w.dim(1);
  Buffer<T> out(m * n);
  MatMap<T> O(out.data(), m, n);
  O.noalias() = detail::view(x) * detail::view(w);
  O.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(b.raw(), n);
  return Tensor<T>::from_op({m, n}, std::move(out), {x, w, b}, [](typename Tensor<T>::Node& o) {
    auto& X = *o.inputs[0];
    auto& W = *o.inputs[1];
    auto& B = *o.inputs[2];
    ConstMatMap<T> G(o.grad.data(), o.shape[0], o.shape[1]);
    if (X.requires_grad) detail::grad_view<T>(X).noalias() += G * detail::data_view<T>(W).transpose();
    if (W.requires_grad) detail::grad_view<T>(W).noalias() += detail::data_view<T>(X).transpose() * G;
    if (B.requires_grad) {
      Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(B.grad_ptr(), o.shape[1]) += G.colwise().sum();
    }
  });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same(a, b, "add");
  Buffer<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.raw()[i] + b.raw()[i];
  return Tensor<T>::from_op(a.shape(), std::move(out), {a, b}, [](typename Tensor<T>::Node& o) {
    for (auto& in : o.inputs) {
      if (!in->requires_grad) continue;
      T* g = in->grad_ptr();
      for (std::size_t i = 0; i < o.grad.size(); ++i) g[i] += o.grad[i];
    }
  });
}

/// x[m×n] + bias[n] broadcast over rows.
template <typename T>
Tensor<T> add_row(const Tensor<T>& x, const Tensor<T>& bias) {
  const std::size_t m = detail::rows2(x, "add_row"), n = x.dim(1);
  if (bias.numel() != n) {
    throw DimensionError("add_row: bias " + shape_str(bias.shape()) + " does not match " +
                         shape_str(x.shape()));
  }
  Buffer<T> out(x.data().begin(), x.data().end());
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] += bias.raw()[c];
  return Tensor<T>::from_op(x.shape(), std::move(out), {x, bias}, [m, n](typename Tensor<T>::Node& o) {
    auto& X = *o.inputs[0];
    auto& B = *o.inputs[1];
    if (X.requires_grad) {
      T* g = X.grad_ptr();
      for (std::size_t i = 0; i < o.grad.size(); ++i) g[i] += o.grad[i];
    }
    if (B.requires_grad) {
      T* g = B.grad_ptr();
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) g[c] += o.grad[r * n + c];
    }
  });
}

/// Elementwise product.
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same(a, b, "mul");
  Buffer<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.raw()[i] * b.raw()[i];
  return Tensor<T>::from_op(a.shape(), std::move(out), {a, b}, [](typename Tensor<T>::Node& o) {
    auto& A = *o.inputs[0];
    auto& B = *o.inputs[1];
    if (A.requires_grad) {
      T* g = A.grad_ptr();
      for (std::size_t i = 0; i < o.grad.size(); ++i) g[i] += o.grad[i] * B.data[i];
    }
    if (B.requires_grad) {
      T* g = B.grad_ptr();
      for (std::size_t i = 0; i < o.grad.size(); ++i) g[i] += o.grad[i] * A.data[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s) {
  Buffer<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.raw()[i] * s;
  return Tensor<T>::from_op(a.shape(), std::move(out), {a}, [s](typename Tensor<T>::Node& o) {
    T* g = o.inputs[0]->grad_ptr();
    for (std::size_t i = 0; i < o.grad.size(); ++i) g[i] += o.grad[i] * s;
  });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T s{0};
  for (T v : a.data()) s += v;
  return Tensor<T>::from_op({}, {s}, {a}, [](typename Tensor<T>::Node& o) {
    T* g = o.inputs[0]->grad_ptr();
    const T up = o.grad[0];
    for (std::size_t i = 0; i < o.inputs[0]->data.size(); ++i) g[i] += up;
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  if (a.numel() == 0) throw DimensionError("mean of an empty tensor");
  return scale(sum(a), T{1} / static_cast<T>(a.numel()));
}

/// Tanh approximation of GELU.
template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  constexpr T c = static_cast<T>(0.7978845608028654);  // sqrt(2/pi)
  constexpr T k = static_cast<T>(0.044715);
  Buffer<T> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const T v = x.raw()[i];
    out[i] = T(0.5) * v * (T(1) + std::tanh(c * (v + k * v * v * v)));
  }
  return Tensor<T>::from_op(x.shape(), std::move(out), {x}, [](typename Tensor<T>::Node& o) {
    auto& X = *o.inputs[0];
    T* g = X.grad_ptr();
    for (std::size_t i = 0; i < o.grad.size(); ++i) {
      const T v = X.data[i];
      const T u = c * (v + k * v * v * v);
      const T th = std::tanh(u);
      const T du = c * (T(1) + T(3) * k * v * v);
      g[i] += o.grad[i] * (T(0.5) * (T(1) + th) + T(0.5) * v * (T(1) - th * th) * du);
    }
  });
}

/// Row-wise normalization over the last axis with affine gamma/beta.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                     T eps = T(1e-5)) {
  const std::size_t m = x.rows(), n = x.cols();
  if (gamma.numel() != n || beta.numel() != n) {
    throw DimensionError("layer_norm: affine parameters do not match " + shape_str(x.shape()));
  }
  Buffer<T> out(x.numel()), xhat(x.numel()), rstd(m);
  for (std::size_t r = 0; r < m; ++r) {
    const T* row = x.raw() + r * n;
    T mu{0};
    for (std::size_t c = 0; c < n; ++c) mu += row[c];
    mu /= static_cast<T>(n);
    T var{0};
    for (std::size_t c = 0; c < n; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= static_cast<T>(n);
    rstd[r] = T(1) / std::sqrt(var + eps);
    for (std::size_t c = 0; c < n; ++c) {
      xhat[r * n + c] = (row[c] - mu) * rstd[r];
      out[r * n + c] = xhat[r * n + c] * gamma.raw()[c] + beta.raw()[c];
    }
  }
  return Tensor<T>::from_op(
      x.shape(), std::move(out), {x, gamma, beta},
      [m, n, xhat = std::move(xhat), rstd = std::move(rstd)](typename Tensor<T>::Node& o) {
        auto& X = *o.inputs[0];
        auto& G = *o.inputs[1];
        auto& B = *o.inputs[2];
        const T* up = o.grad.data();
        if (G.requires_grad || B.requires_grad) {
          for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < n; ++c) {
              if (G.requires_grad) G.grad_ptr()[c] += up[r * n + c] * xhat[r * n + c];
              if (B.requires_grad) B.grad_ptr()[c] += up[r * n + c];
            }
        }
        if (!X.requires_grad) return;
        T* gx = X.grad_ptr();
        Buffer<T> dxhat(n);
        for (std::size_t r = 0; r < m; ++r) {
          T s1{0}, s2{0};
          for (std::size_t c = 0; c < n; ++c) {
            dxhat[c] = up[r * n + c] * G.data[c];
            s1 += dxhat[c];
            s2 += dxhat[c] * xhat[r * n + c];
          }
          const T inv_n = T(1) / static_cast<T>(n);
          for (std::size_t c = 0; c < n; ++c) {
            gx[r * n + c] += rstd[r] * (dxhat[c] - inv_n * s1 - xhat[r * n + c] * inv_n * s2);
          }
        }
      });
}

/// Log-sum-exp of a row, shifted by the row maximum.
template <typename T>
T logsumexp(std::span<const T> row) {
  if (row.empty()) return -std::numeric_limits<T>::infinity();
  T mx = row[0];
  for (T v : row) mx = std::max(mx, v);
  if (std::isinf(mx)) return mx;
  T s{0};
  for (T v : row) s += std::exp(v - mx);
  return mx + std::log(s);
}

/// Last-axis softmax with the row maximum shifted out. NaN inputs propagate.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x) {
  const std::size_t m = x.rows(), n = x.cols();
  if (n == 0) throw DimensionError("softmax over an empty axis");
  Buffer<T> out(x.numel());
  for (std::size_t r = 0; r < m; ++r) {
    const T* row = x.raw() + r * n;
    T mx = row[0];
    for (std::size_t c = 1; c < n; ++c) mx = std::max(mx, row[c]);
    T s{0};
    for (std::size_t c = 0; c < n; ++c) s += (out[r * n + c] = std::exp(row[c] - mx));
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] /= s;
  }
  return Tensor<T>::from_op(x.shape(), std::move(out), {x}, [m, n](typename Tensor<T>::Node& o) {
    T* g = o.inputs[0]->grad_ptr();
    for (std::size_t r = 0; r < m; ++r) {
      T dot{0};
      for (std::size_t c = 0; c < n; ++c) dot += o.grad[r * n + c] * o.data[r * n + c];
      for (std::size_t c = 0; c < n; ++c) g[r * n + c] += o.data[r * n + c] * (o.grad[r * n + c] - dot);
    }
  });
}

template <typename T>
Tensor<T> log_softmax(const Tensor<T>& x) {
  const std::size_t m = x.rows(), n = x.cols();
  if (n == 0) throw DimensionError("log_softmax over an empty axis");
  Buffer<T> out(x.numel());
  for (std::size_t r = 0; r < m; ++r) {
    const T lse = logsumexp<T>({x.raw() + r * n, n});
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = x.raw()[r * n + c] - lse;
  }
  return Tensor<T>::from_op(x.shape(), std::move(out), {x}, [m, n](typename Tensor<T>::Node& o) {
    T* g = o.inputs[0]->grad_ptr();
    for (std::size_t r = 0; r < m; ++r) {
      T s{0};
      for (std::size_t c = 0; c < n; ++c) s += o.grad[r * n + c];
      for (std::size_t c = 0; c < n; ++c) g[r * n + c] += o.grad[r * n + c] - std::exp(o.data[r * n + c]) * s;
    }
  });
}

/// Gathers rows of table[V×d] by id.
template <typename T>
Tensor<T> embedding(const Tensor<T>& table, std::span<const int> ids) {
  const std::size_t V = detail::rows2(table, "embedding"), d = table.dim(1);
  Buffer<T> out(ids.size() * d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= V) {
      throw DimensionError("embedding: id " + std::to_string(ids[i]) + " outside table of " +
                           std::to_string(V) + " rows");
    }
    std::copy_n(table.raw() + ids[i] * d, d, out.data() + i * d);
  }
  return Tensor<T>::from_op({ids.size(), d}, std::move(out), {table},
                            [d, idx = std::vector<int>(ids.begin(), ids.end())](typename Tensor<T>::Node& o) {
                              T* g = o.inputs[0]->grad_ptr();
                              for (std::size_t i = 0; i < idx.size(); ++i)
                                for (std::size_t c = 0; c < d; ++c) g[idx[i] * d + c] += o.grad[i * d + c];
                            });
}

/// Mean over rows of -log softmax(logits)[row, target[row]].
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits, std::span<const int> targets) {
  const std::size_t m = detail::rows2(logits, "cross_entropy"), V = logits.dim(1);
  if (targets.size() != m) {
    throw DimensionError("cross_entropy: " + std::to_string(targets.size()) + " targets for " +
                         std::to_string(m) + " rows");
  }
  if (m == 0) throw DimensionError("cross_entropy over zero rows");
  Buffer<T> probs(logits.numel());
  T loss{0};
  for (std::size_t r = 0; r < m; ++r) {
    if (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= V) {
      throw DimensionError("cross_entropy: target " + std::to_string(targets[r]) + " out of range");
    }
    const T* row = logits.raw() + r * V;
    const T lse = logsumexp<T>({row, V});
    for (std::size_t c = 0; c < V; ++c) probs[r * V + c] = std::exp(row[c] - lse);
    loss += lse - row[targets[r]];
  }
  loss /= static_cast<T>(m);
  return Tensor<T>::from_op(
      {}, {loss}, {logits},
      [m, V, probs = std::move(probs), tg = std::vector<int>(targets.begin(), targets.end())](
          typename Tensor<T>::Node& o) {
        T* g = o.inputs[0]->grad_ptr();
        const T up = o.grad[0] / static_cast<T>(m);
        for (std::size_t r = 0; r < m; ++r) {
          for (std::size_t c = 0; c < V; ++c) g[r * V + c] += up * probs[r * V + c];
          g[r * V + tg[r]] -= up;
        }
      });
}

/// Stacks a[m×d] on top of b[n×d].
template <typename T>
Tensor<T> concat_rows(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(1)) {
    throw DimensionError("concat_rows: " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
  }
  Buffer<T> out;
  out.reserve(a.numel() + b.numel());
  out.insert(out.end(), a.data().begin(), a.data().end());
  out.insert(out.end(), b.data().begin(), b.data().end());
  const std::size_t na = a.numel();
  return Tensor<T>::from_op({a.dim(0) + b.dim(0), a.dim(1)}, std::move(out), {a, b},
                            [na](typename Tensor<T>::Node& o) {
                              auto& A = *o.inputs[0];
                              auto& B = *o.inputs[1];
                              if (A.requires_grad) {
                                T* g = A.grad_ptr();
                                for (std::size_t i = 0; i < na; ++i) g[i] += o.grad[i];
                              }
                              if (B.requires_grad) {
                                T* g = B.grad_ptr();
                                for (std::size_t i = 0; i < B.data.size(); ++i) g[i] += o.grad[na + i];
                              }
                            });
}

/// Rows [begin, begin+count) of a matrix.
template <typename T>
Tensor<T> slice_rows(const Tensor<T>& x, std::size_t begin, std::size_t count) {
  const std::size_t m = detail::rows2(x, "slice_rows"), d = x.dim(1);
  if (begin + count > m) {
    throw DimensionError("slice_rows: rows [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") of " + shape_str(x.shape()));
  }
  Buffer<T> out(x.raw() + begin * d, x.raw() + (begin + count) * d);
  return Tensor<T>::from_op({count, d}, std::move(out), {x}, [begin, d](typename Tensor<T>::Node& o) {
    T* g = o.inputs[0]->grad_ptr() + begin * d;
    for (std::size_t i = 0; i < o.grad.size(); ++i) g[i] += o.grad[i];
  });
}

/// Averages consecutive windows of rows; a trailing partial window is
/// averaged over the rows it actually holds.
template <typename T>
Tensor<T> mean_pool_rows(const Tensor<T>& x, std::size_t window) {
  if (window == 0) throw ConfigError("mean_pool_rows: window must be positive");
  const std::size_t m = detail::rows2(x, "mean_pool_rows"), d = x.dim(1);
  const std::size_t out_rows = (m + window - 1) / window;
  Buffer<T> out(out_rows * d, T{0});
  for (std::size_t w = 0; w < out_rows; ++w) {
    const std::size_t lo = w * window, hi = std::min(m, lo + window);
    const T inv = T(1) / static_cast<T>(hi - lo);
    for (std::size_t r = lo; r < hi; ++r)
      for (std::size_t c = 0; c < d; ++c) out[w * d + c] += x.raw()[r * d + c] * inv;
  }
  return Tensor<T>::from_op({out_rows, d}, std::move(out), {x},
                            [m, d, window, out_rows](typename Tensor<T>::Node& o) {
                              T* g = o.inputs[0]->grad_ptr();
                              for (std::size_t w = 0; w < out_rows; ++w) {
                                const std::size_t lo = w * window, hi = std::min(m, lo + window);
                                const T inv = T(1) / static_cast<T>(hi - lo);
                                for (std::size_t r = lo; r < hi; ++r)
                                  for (std::size_t c = 0; c < d; ++c) g[r * d + c] += o.grad[w * d + c] * inv;
                              }
                            });
}

/// Multi-head scaled dot-product attention over already projected q, k, v
/// (each [n×d], heads laid out as contiguous column blocks). With `causal`,
/// position i attends to positions ≤ i only.
template <typename T>
Tensor<T> attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v, std::size_t heads,
                    bool causal) {
  detail::require_same(q, k, "attention");
  detail::require_same(q, v, "attention");
  const std::size_t n = detail::rows2(q, "attention"), d = q.dim(1);
  if (heads == 0 || d % heads != 0) {
    throw DimensionError("attention: width " + std::to_string(d) + " not divisible by " +
                         std::to_string(heads) + " heads");
  }
  const std::size_t dh = d / heads;
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));
  Buffer<T> out(n * d);
  Buffer<T> probs(heads * n * n);
  RowMat<T> scores(n, n);
  for (std::size_t h = 0; h < heads; ++h) {
    ConstStridedMap<T> Q(q.raw() + h * dh, n, dh, Eigen::OuterStride<>(d));
    ConstStridedMap<T> K(k.raw() + h * dh, n, dh, Eigen::OuterStride<>(d));
    ConstStridedMap<T> Vh(v.raw() + h * dh, n, dh, Eigen::OuterStride<>(d));
    scores.noalias() = (Q * K.transpose()) * inv_sqrt;
    MatMap<T> P(probs.data() + h * n * n, n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lim = causal ? i + 1 : n;
      T mx = scores(i, 0);
      for (std::size_t j = 1; j < lim; ++j) mx = std::max(mx, scores(i, j));
      T s{0};
      for (std::size_t j = 0; j < lim; ++j) {
        P(i, j) = std::exp(scores(i, j) - mx);
        s += P(i, j);
      }
      for (std::size_t j = 0; j < lim; ++j) P(i, j) /= s;
      for (std::size_t j = lim; j < n; ++j) P(i, j) = T{0};
    }
    StridedMap<T> O(out.data() + h * dh, n, dh, Eigen::OuterStride<>(d));
    O.noalias() = P * Vh;
  }
  return Tensor<T>::from_op(
      q.shape(), std::move(out), {q, k, v},
      [n, d, dh, heads, inv_sqrt, probs = std::move(probs)](typename Tensor<T>::Node& o) {
        auto& Qn = *o.inputs[0];
        auto& Kn = *o.inputs[1];
        auto& Vn = *o.inputs[2];
        RowMat<T> dP(n, n), dS(n, n);
        for (std::size_t h = 0; h < heads; ++h) {
          const Eigen::OuterStride<> st(d);
          ConstMatMap<T> P(probs.data() + h * n * n, n, n);
          ConstStridedMap<T> dO(o.grad.data() + h * dh, n, dh, st);
          ConstStridedMap<T> Q(Qn.data.data() + h * dh, n, dh, st);
          ConstStridedMap<T> K(Kn.data.data() + h * dh, n, dh, st);
          ConstStridedMap<T> Vh(Vn.data.data() + h * dh, n, dh, st);
          if (Vn.requires_grad) {
            StridedMap<T> dV(Vn.grad_ptr() + h * dh, n, dh, st);
            dV.noalias() += P.transpose() * dO;
          }
          if (!Qn.requires_grad && !Kn.requires_grad) continue;
          dP.noalias() = dO * Vh.transpose();
          for (std::size_t i = 0; i < n; ++i) {
            T dot{0};
            for (std::size_t j = 0; j < n; ++j) dot += dP(i, j) * P(i, j);
            for (std::size_t j = 0; j < n; ++j) dS(i, j) = P(i, j) * (dP(i, j) - dot) * inv_sqrt;
          }
          if (Qn.requires_grad) {
            StridedMap<T> dQ(Qn.grad_ptr() + h * dh, n, dh, st);
            dQ.noalias() += dS * K;
          }
          if (Kn.requires_grad) {
            StridedMap<T> dK(Kn.grad_ptr() + h * dh, n, dh, st);
            dK.noalias() += dS.transpose() * Q;
          }
        }
      });
}

/// Inverted dropout. Identity (same tensor) when not training or p == 0.
template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double p, Rng& rng, bool training) {
  if (!training || p <= 0.0) return x;
  if (p >= 1.0) throw ConfigError("dropout probability must be < 1");
  Buffer<T> mask(x.numel());
  const T keep = static_cast<T>(1.0 / (1.0 - p));
  for (auto& m : mask) m = rng.uniform() < p ? T{0} : keep;
  return mul(x, Tensor<T>::from_buffer(x.shape(), std::move(mask)));
}

}  // namespace nle::ops
