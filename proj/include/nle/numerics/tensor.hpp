// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <memory>
#include <new>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nle/error.hpp"

namespace nle {

/// Floating point width used for model math. Selected once per process
/// (NLE_DESK_PRECISION=f32|f64) and dispatched at the top level; every tensor
/// of a run shares it.
enum class Precision { f32, f64 };

inline Precision precision_from_env() {
  const char* v = std::getenv("NLE_DESK_PRECISION");
  if (v == nullptr || std::string_view(v).empty() || std::string_view(v) == "f32") {
    return Precision::f32;
  }
  if (std::string_view(v) == "f64") return Precision::f64;
  throw ConfigError("NLE_DESK_PRECISION must be f32 or f64, got '" + std::string(v) + "'");
}

inline std::string_view to_string(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

/// Cache-line aligned allocation. Every buffer then starts at the same
/// alignment, so SIMD kernels take the same path (and summation order) on
/// every run.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using Buffer = std::vector<T, AlignedAllocator<T>>;

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  Buffer<T> data;
  Buffer<T> grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  T* grad_ptr() {
    if (grad.empty()) grad.assign(data.size(), T{0});
    return grad.data();
  }
};

inline bool& grad_mode() {
  thread_local bool enabled = true;
  return enabled;
}

}  // namespace detail

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard() : prev_(detail::grad_mode()) { detail::grad_mode() = false; }
  ~NoGradGuard() { detail::grad_mode() = prev_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

/// Dense row-major tensor with an optional reverse-mode graph attached.
///
/// A Tensor is a cheap handle; copies share storage. Operations never mutate
/// their inputs. Gradients always accumulate, so a value reached along two
/// paths receives both contributions and repeated backward calls sum.
template <typename T>
class Tensor {
 public:
  using value_type = T;
  using Node = detail::Node<T>;

  Tensor() = default;

  /// Zero-filled.
  explicit Tensor(Shape shape) : node_(std::make_shared<Node>()) {
    node_->data.assign(shape_numel(shape), T{0});
    node_->shape = std::move(shape);
  }

  Tensor(Shape shape, const std::vector<T>& data, bool requires_grad = false)
      : Tensor(std::move(shape), Buffer<T>(data.begin(), data.end()), requires_grad, Adopt{}) {}

  /// Takes ownership of an aligned buffer without copying.
  static Tensor from_buffer(Shape shape, Buffer<T> data, bool requires_grad = false) {
    return Tensor(std::move(shape), std::move(data), requires_grad, Adopt{});
  }

  static Tensor scalar(T v, bool requires_grad = false) {
    return Tensor(Shape{}, Buffer<T>{v}, requires_grad, Adopt{});
  }

  /// Result of an operation. The graph edge is only recorded when some input
  /// requires a gradient.
  static Tensor from_op(Shape shape, Buffer<T> data, std::vector<Tensor> inputs,
                        std::function<void(Node&)> backward) {
    Tensor out(std::move(shape), std::move(data), false, Adopt{});
    const bool any = detail::grad_mode() && std::any_of(inputs.begin(), inputs.end(),
                                 [](const Tensor& t) { return t.requires_grad(); });
    if (any) {
      out.node_->requires_grad = true;
      out.node_->backward = std::move(backward);
      out.node_->inputs.reserve(inputs.size());
      for (auto& t : inputs) out.node_->inputs.push_back(t.node_);
    }
    return out;
  }

 private:
  struct Adopt {};

  Tensor(Shape shape, Buffer<T> data, bool requires_grad, Adopt) : node_(std::make_shared<Node>()) {
    if (shape_numel(shape) != data.size()) {
      throw DimensionError("tensor shape " + shape_str(shape) + " holds " +
                           std::to_string(shape_numel(shape)) + " values, got " +
                           std::to_string(data.size()));
    }
    node_->shape = std::move(shape);
    node_->data = std::move(data);
    node_->requires_grad = requires_grad;
  }

 public:
  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t numel() const { return node_->data.size(); }
  std::size_t rows() const { return rank() == 0 ? 1 : node_->shape[0]; }
  std::size_t cols() const { return rank() < 2 ? numel() : numel() / node_->shape[0]; }

  std::span<const T> data() const { return node_->data; }
  /// Mutable access for leaves such as parameters and optimizer updates.
  std::span<T> mutable_data() { return node_->data; }
  const T* raw() const { return node_->data.data(); }

  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return {node_->grad_ptr(), node_->data.size()}; }

  T item() const {
    if (numel() != 1) throw DimensionError("item() on tensor of shape " + shape_str(shape()));
    return node_->data[0];
  }
  T at(std::size_t r, std::size_t c) const { return node_->data[r * cols() + c]; }

  bool requires_grad() const noexcept { return node_ && node_->requires_grad; }
  void set_requires_grad(bool v) { node_->requires_grad = v; }

  void zero_grad() { node_->grad.clear(); }

  /// Copy of the values with no graph attached.
  Tensor detach() const { return Tensor(shape(), node_->data, false, Adopt{}); }

  bool same_storage(const Tensor& o) const noexcept { return node_ == o.node_; }
  Node& node() const { return *node_; }

  /// Reverse pass from a scalar, seeding d(self)/d(self) = 1.
  void backward() const {
    if (numel() != 1) {
      throw DimensionError("backward() needs a scalar, got " + shape_str(shape()));
    }
    if (!requires_grad()) return;
    std::vector<Node*> order;
    topo_sort(order);
    node_->grad_ptr()[0] += T{1};
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Node* n = *it;
      if (n->backward && !n->grad.empty()) {
        n->backward(*n);
        n->grad.clear();  // intermediate: consumed; leaves keep accumulating
      }
    }
  }

 private:
  void topo_sort(std::vector<Node*>& order) const {
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(node_.get(), 0);
    seen.insert(node_.get());
    while (!stack.empty()) {
      auto& [n, next] = stack.back();
      if (next < n->inputs.size()) {
        Node* child = n->inputs[next++].get();
        if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
      } else {
        order.push_back(n);
        stack.pop_back();
      }
    }
  }

  std::shared_ptr<Node> node_;
};

/// A named trainable tensor.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> tensor;

  bool is_lora() const {
    return name.ends_with(".lora_a") || name.ends_with(".lora_b");
  }
};

}  // namespace nle
